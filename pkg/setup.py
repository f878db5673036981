"""Build script for the optional compiled expression VM.

The package is pure Python except for pricegate.expr._fastvm, a Cython
build of the expression bytecode interpreter. The extension is strictly
optional: when Cython or a C compiler is unavailable the install falls
back to the pure Python interpreter in pricegate.expr.vm, which shares
the same instruction set. Set PRICEGATE_SKIP_EXT=1 to skip the build.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("PRICEGATE_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "pricegate.expr._fastvm",
                    ["src/pricegate/expr/_fastvm.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, zip_safe=False)
