"""Build the optional Cython kernels.

The package works without them; ``diffmask.kernels`` falls back to the
pure-Python twin when ``diffmask._ckernels`` cannot be imported.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("DIFFMASK_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        sys.stderr.write("Cython not available; building pure-Python only\n")
    else:
        # No FMA contraction: both backends must round identically.
        extra = [] if sys.platform == "win32" else ["-O2", "-ffp-contract=off"]
        ext_modules = cythonize(
            [
                Extension(
                    "diffmask._ckernels",
                    ["src/diffmask/_ckernels.pyx"],
                    extra_compile_args=extra,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
