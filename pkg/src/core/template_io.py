"""
Template Files
==============
Reading and writing templates as JSON documents of the form

    {"n": N, "classes": [E1, E2, E3]}

where each E is a lexicographically sorted list of [u, v] with 0 <= u < v < N.
Serialization is byte-stable: the same template always yields the same text.
"""

import json
import logging
from typing import Any, List

from src.core.exceptions import TemplateFormatError, ValidationError
from src.core.template import ColouringTemplate, new_template

# Configure logging
logger = logging.getLogger(__name__)

# ============================================================================
# SERIALIZATION
# ============================================================================

def template_to_json(template: ColouringTemplate) -> str:
    """
    Serialize a template to canonical JSON text (newline-terminated).

    Args:
        template: Template to serialize

    Returns:
        JSON text
    """
    document = {
        'n': template.n,
        'classes': [[[u, v] for u, v in pairs] for pairs in template.classes],
    }
    return json.dumps(document) + "\n"


def write_template(template: ColouringTemplate, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as file:
        file.write(template_to_json(template))
    logger.info(f"Wrote template with n={template.n} to {path}")


# ============================================================================
# PARSING
# ============================================================================

def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_class(pairs: Any, index: int, n: int) -> List[List[int]]:
    name = f"classes[{index}]"
    if not isinstance(pairs, list):
        raise TemplateFormatError("class must be a list of pairs", field=name)
    previous = None
    for k, pair in enumerate(pairs):
        where = f"{name}[{k}]"
        if not isinstance(pair, list) or len(pair) != 2 or not all(_is_int(x) for x in pair):
            raise TemplateFormatError("pair must be a list of two integers", field=where)
        u, v = pair
        if not 0 <= u < v < n:
            raise TemplateFormatError(f"pair [{u}, {v}] must satisfy 0 <= u < v < {n}", field=where)
        if previous is not None:
            if (u, v) == previous:
                raise TemplateFormatError(f"duplicate pair [{u}, {v}]", field=where)
            if (u, v) < previous:
                raise TemplateFormatError(f"pair [{u}, {v}] is out of lexicographic order", field=where)
        previous = (u, v)
    return pairs


def template_from_json(text: str) -> ColouringTemplate:
    """
    Parse template JSON text.

    Raises:
        TemplateFormatError: With a line number for malformed JSON or a field path for bad content
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise TemplateFormatError(f"malformed JSON: {e.msg}", line=e.lineno) from e

    if not isinstance(document, dict):
        raise TemplateFormatError("template must be a JSON object", line=1)
    missing = {'n', 'classes'} - set(document)
    if missing:
        raise TemplateFormatError(f"missing key(s): {', '.join(sorted(missing))}", field=sorted(missing)[0])
    extra = set(document) - {'n', 'classes'}
    if extra:
        raise TemplateFormatError(f"unexpected key(s): {', '.join(sorted(extra))}", field=sorted(extra)[0])

    n = document['n']
    if not _is_int(n) or n < 0:
        raise TemplateFormatError("n must be a non-negative integer", field="n")
    classes = document['classes']
    if not isinstance(classes, list) or len(classes) != 3:
        raise TemplateFormatError("classes must be a list of exactly three edge lists", field="classes")

    checked = [_check_class(pairs, i, n) for i, pairs in enumerate(classes)]
    try:
        return new_template(n, checked)
    except ValidationError as e:
        raise TemplateFormatError(e.message, field=e.field) from e


def read_template(path: str) -> ColouringTemplate:
    """
    Load a template file.

    Raises:
        TemplateFormatError: If the file is missing or malformed
    """
    try:
        with open(path, 'r', encoding='utf-8') as file:
            text = file.read()
    except OSError as e:
        raise TemplateFormatError(f"cannot read {path}: {e.strerror}") from e
    template = template_from_json(text)
    logger.debug(f"Loaded template n={template.n} from {path}")
    return template
