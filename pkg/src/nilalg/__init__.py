"""Exact computations with nilpotent associative algebras given by structure constants."""
from .algebra import (AlgebraTable, Centers, DimProfile, PowerSeries, Subspace, associativity_defect,
                      centers, classify_profile, is_associative, is_commutative, is_nilpotent, multiply,
                      nilindex, power_series)
from .census import CensusReport, enumerate_tables, orbit_classify, run_census, scan, verify_theorems
from .documents import document_to_table, load_table, save_table, table_to_document
from .errors import (BudgetExceeded, DegenerateChange, DimensionMismatch, DimensionTooLarge,
                     InvalidDimension, InvalidParameter, MalformedDocument, NilAlgError,
                     NotNilpotentInput, NotNilpotentOperator, SingularMatrix)
from .families import (BasisChange, FamilyId, build, normalize, parameter_map,
                       restriction_system_check)
from .field import GF, QQ, FieldSpec, Matrix, invert, nullspace, rank, rref
from .grading import GradedAlgebra, GradingVerdict, associated_graded, is_naturally_graded
from .iso import InvariantVector, IsoResult, invariants, iso_search, transport, verify_witness
from .spectral import CharSequence, char_sequence, jordan_type, left_mult_matrix, rank_bound_check

__version__ = "0.1.0"
