"""Build script for the optional compiled Fokker-Planck stencil kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes large phase-space runs faster.
`-ffp-contract=off` keeps the C arithmetic bit-identical to the fallback
so the two backends can be compared exactly.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stoqlab._kernels._fp_ext",
                ["src/stoqlab/_kernels/_fp_ext.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
