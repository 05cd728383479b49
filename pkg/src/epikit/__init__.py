"""Stochastic SIR-family epidemic toolkit: exact simulation engines, the
asymptotic theory (final size, extinction, growth rates, endemic levels,
vaccination thresholds), and estimators with standard errors, verified
against an exact chain-binomial oracle."""

from .core import (EpidemicParams, EstimateWithSE, FinalSizeData, Trajectory,
                   ValidationError, Violation, offspring_pgf, replicate_rng,
                   validate)
from .distributions import (ConstantPeriod, EmpiricalGenerationTime,
                            EmpiricalPeriod, ExponentialPeriod, GammaPeriod,
                            GenerationTimeDist, GenerationTimeFromPeriod,
                            InfectiousPeriodDist)
from .chains import ChainRecord, chain_probability, enumerate_chains, final_size_distribution
from .estimators import (EstimationError, FitReport, IncidenceSeries,
                         TemporalData, estimate_beta, estimate_growth_rate,
                         estimate_infectious_period, estimate_r0_emerging,
                         estimate_r0_endemic, estimate_r0_final_size,
                         estimate_vc_endemic, estimate_vc_final_size,
                         model_fit_report)
from .simulate import (ChainState, ReplicateResult, ReplicateSummary,
                       run_replicates, simulate_endemic, simulate_reed_frost,
                       simulate_sir, simulate_sir_gillespie, take_off_threshold)
from .theory import (DeterministicCurve, critical_vaccination, effective_r,
                     endemic_level, extinction_probability, integrate_endemic,
                     integrate_sir, lotka_r0, malthusian_rate, multitype_r0,
                     solve_final_size, take_off_probability, vaccinated_r)

__version__ = "0.1.0"
