"""Build script: compiles the word-packed GF(2) kernels when Cython is available.

The extension is optional. Set IQPFORGE_SKIP_EXT=1 (or install without
Cython) to get a pure-Python package; the kernels then fall back to the
int-bitset implementations at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("IQPFORGE_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("iqpforge._gf2core", ["src/iqpforge/_gf2core.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
