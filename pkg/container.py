from concurrent.futures import ThreadPoolExecutor

from dependency_injector import containers, providers
from dotenv import load_dotenv

from src.determinants.determinants import DeterminantMethodKey
from src.determinants.lu import LUDeterminant
from src.determinants.trace_log import TraceLogDeterminant
from src.elliptic_core.elliptic_core import SeriesBudget

load_dotenv()


class Container(containers.DeclarativeContainer):
    config = providers.Configuration()

    series_budget = providers.Singleton(
        SeriesBudget,
        lattice_cutoff=config.lattice_cutoff,
        qseries_cutoff=config.qseries_cutoff,
        rel_tol=config.rel_tol,
    )
    determinant_method = providers.Selector(
        config.det_method,
        **{
            DeterminantMethodKey.TRACE_LOG.value: providers.Singleton(TraceLogDeterminant),
            DeterminantMethodKey.LU.value: providers.Singleton(LUDeterminant),
        },
    )
    sweep_executor = providers.Factory(
        ThreadPoolExecutor,
        max_workers=config.threads,
    )


container = Container()
container.config.log_level.from_env("LOG_LEVEL", default="INFO", as_=str)
container.config.threads.from_env("SEWKERNEL_THREADS", default=4, as_=int)
container.config.det_method.from_env(
    "SEWKERNEL_DET_METHOD", default=DeterminantMethodKey.LU.value, as_=str.lower
)
container.config.truncation.from_env("SEWKERNEL_TRUNCATION", default=16, as_=int)
container.config.quad_m.from_env("SEWKERNEL_QUAD_M", default=256, as_=int)
container.config.lattice_cutoff.from_env("SEWKERNEL_LATTICE_CUTOFF", default=8, as_=int)
container.config.qseries_cutoff.from_env("SEWKERNEL_QSERIES_CUTOFF", default=64, as_=int)
container.config.rel_tol.from_env("SEWKERNEL_REL_TOL", default=1e-14, as_=float)
