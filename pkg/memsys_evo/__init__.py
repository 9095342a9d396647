__version__ = '0.1.0'

from memsys_evo.errors import (ArityMismatch, ArityMismatchResponse,
                               BackendExited, CapacityExceeded,
                               CatalogError, CatalogParseError,
                               CommunicationError, EmptyInput, EstimatorError,
                               EstimatorTimeout, InfeasibleParameterization,
                               NoEligibleCompiler, PreconditionViolation,
                               ProtocolError, ValidationError)
from memsys_evo.catalog import (Catalog, CompilerSpec, MemoryRequirement,
                                SystemSpec, eligible_compilers,
                                feasible_codes, feasible_combinations,
                                load_catalog, load_system)
from memsys_evo.synthetic import generate_synthetic_system
from memsys_evo.estimator import (ExecBackend, MemoryParameterization,
                                  SurrogateBackend, batch_evaluate,
                                  surrogate_eval)
from memsys_evo.service import EstimatorService
from memsys_evo.genome import build_layout, encode, init_population, repair
from memsys_evo.pareto import (crowding_distance, dominates,
                               fast_nondominated_sort, nsga2_select,
                               skyline_dc)
from memsys_evo.engine import (DeConfig, RunResult, crossover_bin,
                               evolve_generation, mutate_rand1,
                               run_optimization)
from memsys_evo.baseline import (CandidateTable, enumerate_candidates,
                                 exhaustive_front, instance_choice,
                                 instance_fronts)
from memsys_evo.metrics import (DeviationReport, FrontStats, deviation_report,
                                front_stats)


__all__ = ['ArityMismatch', 'ArityMismatchResponse', 'BackendExited',
           'CapacityExceeded', 'CatalogError', 'CatalogParseError',
           'CommunicationError', 'EmptyInput', 'EstimatorError',
           'EstimatorTimeout', 'InfeasibleParameterization',
           'NoEligibleCompiler', 'PreconditionViolation', 'ProtocolError',
           'ValidationError',
           'Catalog', 'CompilerSpec', 'MemoryRequirement', 'SystemSpec',
           'eligible_compilers', 'feasible_codes', 'feasible_combinations',
           'load_catalog', 'load_system', 'generate_synthetic_system',
           'ExecBackend', 'MemoryParameterization', 'SurrogateBackend',
           'batch_evaluate', 'surrogate_eval', 'EstimatorService',
           'build_layout', 'encode', 'init_population', 'repair',
           'crowding_distance', 'dominates', 'fast_nondominated_sort',
           'nsga2_select', 'skyline_dc',
           'DeConfig', 'RunResult', 'crossover_bin', 'evolve_generation',
           'mutate_rand1', 'run_optimization',
           'CandidateTable', 'enumerate_candidates', 'exhaustive_front',
           'instance_choice', 'instance_fronts',
           'DeviationReport', 'FrontStats', 'deviation_report', 'front_stats']
