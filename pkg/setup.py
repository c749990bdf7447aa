"""Build script for the optional Cython kernels.

    pip install -e . --no-build-isolation

If the extension fails to compile the package still installs and runs on the
pure-Python kernels in ``incongruity._pykernels``.
"""
import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "incongruity._kernels",
        sources=["src/incongruity/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # no FMA contraction: the compiled folds must match the Python ones bit for bit
        extra_compile_args=["-O2", "-ffp-contract=off"],
        optional=True,
    ),
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    ),
)
