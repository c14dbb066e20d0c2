"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (pure numpy kernels are selected at
import time); building it just speeds up window evaluation and the reduction
loops. Any build failure is therefore non-fatal.
"""
import numpy as np
from setuptools import setup, Extension

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "shearuncert._kernels_cy",
                ["src/shearuncert/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
