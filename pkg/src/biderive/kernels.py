"""Backend selection for the term kernels.

The compiled extension is used when it was built and importable; setting
``BIDERIVE_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("BIDERIVE_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import (  # noqa: F401
        BACKEND, add_terms, diff_terms, divides, mul_terms, normal_form, shift_terms,
    )
else:
    try:
        from ._ckernels import (  # noqa: F401
            BACKEND, add_terms, diff_terms, divides, mul_terms, normal_form, shift_terms,
        )
    except ImportError:
        from ._pykernels import (  # noqa: F401
            BACKEND, add_terms, diff_terms, divides, mul_terms, normal_form, shift_terms,
        )
