"""Normalization and sign ledger shared by the exact core and the solver.

Several scale conventions interlock and are easy to get wrong by a factor
of two, so they are frozen here in one place and every module (and the
test suite) reads them from here.

* The potential-form convention is  F_I = (1/2)(d d_I + d_J d_K) mu  and
  its two cyclic companions.  Under it the flat metric on R^4 has the
  potential  mu = |x|^2 / 4  (FLAT_POTENTIAL_COEFF).

* The equivalent Hessian form of the same statement is
  g = HESSIAN_AVERAGE_FACTOR * (1 + I + J + K) Hess(mu);
  the factor 1/2 is forced by the form convention above (checked for
  random mu by the test suite, not assumed).

* The 4-dimensional elliptic solver normalizes its unknown by the trace
  identity  trace_g(Hess mu) = TRACE_TARGET, whose flat solution is
  |x|^2 / 2.  A solver potential therefore reproduces the Kahler form of
  its metric only up to SOLVER_FORM_SCALE:
  (1/2)(d d_I + d_J d_K) mu_solver = SOLVER_FORM_SCALE * F_I(g).

* With the signed degree action on 1-forms, the quaternionic coframe
  formulas  F_I = alpha ^ I alpha + J alpha ^ K alpha  (and cyclic) hold
  verbatim; COFRAME_SIGN records the empirically fixed global sign.
"""

from fractions import Fraction

FLAT_POTENTIAL_COEFF = Fraction(1, 4)
HESSIAN_AVERAGE_FACTOR = Fraction(1, 2)
TRACE_TARGET = 4
SOLVER_FORM_SCALE = 2
COFRAME_SIGN = 1
