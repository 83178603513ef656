"""Exact annihilating differential operators for cohomology classes of
smooth affine complete intersection families."""

from .cohomology import (CohomClass, CohomologySpace, DegreeBox, build_space,
                         cyclic_annihilator, koszul_rank, lower_y_degree)
from .gkz import (ClassIndex, GkzSystem, beta_from_class,
                  box_annihilation_check, build_system, euler_certificate_x,
                  euler_certificate_y, euler_operators, gkz_generators)
from .geometry import (Chart, LocalForm, jacobian_minor, local_form,
                       sign_sigma, smoothness_certificate)
from .lattice import (PointConfig, RelationBasis, box_from_relation,
                      integer_kernel_basis, relation_check)
from .linsolve import solve_linear
from .parse import ParseError, parse_poly, parse_ratfunc
from .poly import MultiPoly
from .pullback import (AnnihilatorResult, IdealSpan, Specialization,
                       SpecializedOperator, derivation_image,
                       minimal_annihilator, specialize_operator,
                       star_quotient_basis)
from .ratfunc import RatFunc
from .weyl import TwistData, WeylOp, gauss_manin_lift, twist_x, twist_y

__version__ = "0.1.0"
