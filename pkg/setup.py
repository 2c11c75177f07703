"""Build script for the optional compiled simulation kernel.

The package is pure Python except for one hot loop: per-path generation of
renewal cycles inside ``renewcov.simulate``.  That loop ships as a Cython
extension which is compiled here when a toolchain is available; if Cython or
a C compiler is missing the build degrades to the numpy fallback kernel and
everything still works (slower).
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, headers, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: compiled kernel not built ({exc!r}); "
            "renewcov will use the pure-Python simulation backend",
            file=sys.stderr,
        )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(
            f"WARNING: {exc}; skipping compiled kernel build",
            file=sys.stderr,
        )
        return []

    import os.path

    # The C distribution functions (random_gamma etc.) live in numpy's
    # static helper libraries next to the random/_core packages.
    numpy_dir = os.path.dirname(numpy.__file__)
    npyrandom_dir = os.path.join(numpy_dir, "random", "lib")
    npymath_dir = os.path.join(numpy_dir, "_core", "lib")
    if not os.path.isdir(npymath_dir):  # numpy < 2 layout
        npymath_dir = os.path.join(numpy_dir, "core", "lib")

    ext = Extension(
        "renewcov.simulate._pathkernel",
        sources=["src/renewcov/simulate/_pathkernel.pyx"],
        include_dirs=[numpy.get_include()],
        library_dirs=[npyrandom_dir, npymath_dir],
        libraries=["npyrandom", "npymath"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # -ffp-contract=off keeps double arithmetic bit-identical to the
        # interpreter (no FMA contraction), which the determinism tests rely
        # on; do not add -ffast-math.
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
