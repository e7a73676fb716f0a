from .csv_manager import CSVManager
from .spec_io import load_spec, parse_spec, serialize_spec, spec_echo
from .suites import SuiteRunner
from .processor import SuiteProcessor

__all__ = [
    "CSVManager", "load_spec", "parse_spec", "serialize_spec", "spec_echo",
    "SuiteRunner", "SuiteProcessor",
]
