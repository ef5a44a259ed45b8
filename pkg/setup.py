import os
import sys

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

# -ffp-contract=off: no fused multiply-add, keeps results bit-identical to the
# NumPy fallback.  Set QFIELD_NO_OPENMP=1 to build without threads.
compile_args = ["-O3", "-ffp-contract=off"]
link_args = []
if not os.environ.get("QFIELD_NO_OPENMP"):
    compile_args.append("-fopenmp")
    link_args.append("-fopenmp")


class optional_build_ext(build_ext):
    """Build the compiled kernels if possible; the package falls back to NumPy otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, Cython missing, ...
            print(f"warning: compiled kernels not built ({exc}); using NumPy fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); using NumPy fallback", file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "qfield._kernels",
        ["src/qfield/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
