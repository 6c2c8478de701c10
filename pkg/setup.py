import os

from setuptools import setup

ext_modules = []
if os.environ.get("BIDERIVE_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("biderive._ckernels", ["src/biderive/_ckernels.pyx"])],
            language_level=3,
            quiet=True,
        )

setup(ext_modules=ext_modules)
