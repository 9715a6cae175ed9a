import os
import unittest
from dataclasses import fields
from unittest.mock import patch

from app import run
from src.config.settings import RainbowConfig
from src.core.exceptions import (
    CertificationError,
    ConfigurationError,
    PreconditionError,
    SearchLimitError,
    StructureViolation,
    ValidationError,
)
from src.models.command import CommandResult
from src.services.boundary_service import get_boundary_service
from src.services.construction_service import get_construction_service
from src.services.normalization_service import get_normalization_service
from src.services.search_service import get_search_service
from src.services.verifier_service import get_verifier_service
from src.utils.error_handling import CommandError, exit_code_for, handle_command_error


class TestRainbowConfig(unittest.TestCase):
    def test_defaults_are_valid(self):
        config = RainbowConfig()
        self.assertTrue(config.validate())
        self.assertEqual(config.exhaustive_limit, 4)
        self.assertEqual(config.appendix_grid, 8000)
        self.assertFalse(hasattr(config, 'extra_settings'))
        self.assertEqual(set(config.to_dict()), {f.name for f in fields(RainbowConfig)})

    def test_overrides(self):
        config = RainbowConfig().with_overrides(workers=4, log_level=None)
        self.assertEqual(config.workers, 4)
        self.assertEqual(config.log_level, RainbowConfig().log_level)
        with self.assertRaises(ConfigurationError):
            RainbowConfig().with_overrides(colour_count=4)

    def test_out_of_range_values(self):
        for overrides in ({'workers': 0}, {'exhaustive_limit': 6}, {'c_param': 0.0},
                          {'appendix_grid': 1}, {'log_level': 'LOUD'}):
            with self.assertRaises(ConfigurationError, msg=str(overrides)):
                RainbowConfig().with_overrides(**overrides)

    @patch.dict(os.environ, {'RAINBOW_WORKERS': '3', 'RAINBOW_LOG_LEVEL': 'DEBUG'})
    def test_environment_touches_logging_and_workers_only(self):
        config = RainbowConfig.from_env()
        self.assertEqual(config.workers, 3)
        self.assertEqual(config.log_level, 'DEBUG')
        self.assertEqual(config.appendix_lipschitz, RainbowConfig().appendix_lipschitz)

    @patch.dict(os.environ, {'RAINBOW_WORKERS': 'many'})
    def test_malformed_worker_count_is_configuration_error(self):
        with self.assertRaises(ConfigurationError):
            RainbowConfig.from_env()
        result = run(['classify', '--a1', '0.9', '--a2', '0.5'])
        self.assertEqual(result.exit_code, 2)
        self.assertIn("RAINBOW_WORKERS", result.report)

    @patch.dict(os.environ, {'RAINBOW_LOG_LEVEL': 'info'})
    def test_log_level_from_environment_is_case_insensitive(self):
        self.assertEqual(RainbowConfig.from_env().log_level, 'INFO')


class TestErrorHandling(unittest.TestCase):
    def test_exit_codes(self):
        self.assertEqual(exit_code_for(ValidationError("bad")), 2)
        self.assertEqual(exit_code_for(PreconditionError("gallai", "rainbow triangle")), 2)
        self.assertEqual(exit_code_for(SearchLimitError("too large")), 2)
        self.assertEqual(exit_code_for(CertificationError("not positive")), 1)
        self.assertEqual(exit_code_for(StructureViolation("broken")), 1)
        self.assertEqual(exit_code_for(CommandError("usage", exit_code=2)), 2)

    def test_precondition_error_carries_name(self):
        error = PreconditionError("nested", "vertex 3")
        self.assertEqual(error.name, "nested")
        self.assertIn("nested", str(error))
        self.assertIsInstance(error, ValidationError)

    def test_decorator_maps_errors(self):
        @handle_command_error
        def fails_validation():
            raise ValidationError("n must be positive", field="n")

        @handle_command_error
        def crashes():
            raise RuntimeError("boom")

        @handle_command_error
        def succeeds():
            return CommandResult(exit_code=0, report="fine")

        result = fails_validation()
        self.assertEqual(result.exit_code, 2)
        self.assertEqual(result.report, "error: n must be positive")
        self.assertEqual(crashes().exit_code, 1)
        self.assertEqual(succeeds().report, "fine")
        self.assertEqual(fails_validation.__name__, "fails_validation")


class TestServiceAccessors(unittest.TestCase):
    def test_accessors_share_one_instance(self):
        for accessor in (get_boundary_service, get_construction_service, get_verifier_service,
                         get_search_service, get_normalization_service):
            self.assertIs(accessor(), accessor(), accessor.__name__)
        self.assertIs(get_search_service().constructions, get_construction_service())
        self.assertIs(get_verifier_service().boundary, get_boundary_service())


if __name__ == '__main__':
    unittest.main()
