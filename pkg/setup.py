"""Build hook for the optional compiled round kernel.

Metadata lives in pyproject.toml. When Cython or a C compiler is missing
the package still installs and the pure-Python kernel is used instead.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("AMOEBOT_ENERGY_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "amoebot_energy.kernel._ckernel",
                    ["src/amoebot_energy/kernel/_ckernel.pyx"],
                    # keep IEEE semantics identical to the Python fallback
                    extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
