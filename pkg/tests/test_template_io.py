import os
import tempfile
import unittest

from src.core.exceptions import TemplateFormatError, ValidationError
from src.core.template import new_template
from src.core.template_io import read_template, template_from_json, template_to_json, write_template
from src.services.construction_service import build_F, build_H


class TestTemplateSerialization(unittest.TestCase):
    def test_canonical_text(self):
        template = new_template(3, [[(1, 0)], [], [(1, 2)]])
        self.assertEqual(template_to_json(template), '{"n": 3, "classes": [[[0, 1]], [], [[1, 2]]]}\n')

    def test_byte_stable(self):
        template = build_H(3, 2, 2)
        text = template_to_json(template)
        self.assertEqual(template_to_json(template_from_json(text)), text)
        self.assertEqual(template_from_json(text), template)

    def test_file_round_trip(self):
        template = build_F(2, 2, 2)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'f222.json')
            write_template(template, path)
            loaded = read_template(path)
        self.assertEqual(loaded.class_sizes(), (2, 2, 14))
        self.assertEqual(loaded, template)


class TestTemplateParsing(unittest.TestCase):
    def assert_format_error(self, text, field=None):
        with self.assertRaises(TemplateFormatError) as ctx:
            template_from_json(text)
        if field is not None:
            self.assertEqual(ctx.exception.field, field)
        return ctx.exception

    def test_malformed_json_reports_line(self):
        error = self.assert_format_error('{\n  "n": 3,\n  "classes": [[], [], []\n')
        self.assertIsNotNone(error.line)
        self.assertIn("line", str(error))

    def test_format_errors_are_validation_errors(self):
        with self.assertRaises(ValidationError):
            template_from_json('[]')

    def test_missing_and_extra_keys(self):
        self.assert_format_error('{"n": 3}', field="classes")
        self.assert_format_error('{"n": 3, "classes": [[], [], []], "name": "x"}', field="name")

    def test_bad_n(self):
        self.assert_format_error('{"n": -1, "classes": [[], [], []]}', field="n")
        self.assert_format_error('{"n": true, "classes": [[], [], []]}', field="n")

    def test_wrong_class_count(self):
        self.assert_format_error('{"n": 3, "classes": [[], []]}', field="classes")

    def test_pair_errors_name_the_field(self):
        self.assert_format_error('{"n": 3, "classes": [[[1, 0]], [], []]}', field="classes[0][0]")
        self.assert_format_error('{"n": 3, "classes": [[], [[0, 3]], []]}', field="classes[1][0]")
        self.assert_format_error('{"n": 3, "classes": [[], [], [[0, 1], [0, 1]]]}', field="classes[2][1]")
        self.assert_format_error('{"n": 3, "classes": [[[0, 2], [0, 1]], [], []]}', field="classes[0][1]")
        self.assert_format_error('{"n": 3, "classes": [[[0, 1, 2]], [], []]}', field="classes[0][0]")

    def test_missing_file(self):
        with self.assertRaises(TemplateFormatError):
            read_template(os.path.join(tempfile.gettempdir(), 'does-not-exist', 't.json'))


if __name__ == '__main__':
    unittest.main()
