"""Build the optional compiled kernel core.

If Cython or a C compiler is missing the package still installs and the
numpy kernels are used instead.
"""
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback",
                  file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc}); using numpy fallback",
                  file=sys.stderr)


def extensions():
    if os.environ.get("HHLFLOW_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    openmp = [] if sys.platform == "darwin" else ["-fopenmp"]
    # tuned for the build host; HHLFLOW_PORTABLE=1 for binaries that move between machines
    arch = [] if os.environ.get("HHLFLOW_PORTABLE") else ["-march=native"]
    ext = Extension(
        "hhlflow.svsim._ckernels",
        ["src/hhlflow/svsim/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        # limited range: plain complex multiply instead of the C99 NaN-safe libcall
        extra_compile_args=["-O3", "-fcx-limited-range"] + arch + openmp,
        extra_link_args=openmp,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
