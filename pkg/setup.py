import os
import sys

from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled windowed dot products bit-identical to
# the pure-Python fallback (no FMA contraction).
ext_modules = []
if not os.environ.get("ALGCPD_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "algcpd._core",
                    ["src/algcpd/_core.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        print("Cython not available, installing with the pure-Python core", file=sys.stderr)

setup(ext_modules=ext_modules)
