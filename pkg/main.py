import logging

from cli import app
from container import container
from logging_config import load_logging_config

load_logging_config(container.config.log_level())

logger = logging.getLogger(__name__)

logger.debug("Starting sewkernel CLI...")
app(prog_name="sewkernel")
