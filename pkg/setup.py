"""Build script: compiles the optional shortest-path extension when Cython is present.

The package is fully functional without the extension; `factflow._kernel`
falls back to the pure-Python search at import time. Set FACTFLOW_NO_EXT=1
to skip compilation entirely.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("FACTFLOW_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "factflow._spath",
        ["src/factflow/_spath.pyx"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
