"""Build the optional compiled kernel.

The package works without it (a pure-Python twin of the kernel is selected at
import time), so any failure here is tolerated: no compiler, no Cython, or a
broken toolchain just means the slow path.

No -ffast-math and no -march=native: the compiled kernel must produce results
bit-identical to the Python twin, which rules out FMA contraction and
reassociation.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "schwarzmin._kernels._core",
                ["src/schwarzmin/_kernels/_core.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - toolchain dependent
    print(f"skipping compiled kernel: {exc}")

setup(ext_modules=ext_modules)
