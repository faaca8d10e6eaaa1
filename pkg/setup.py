"""Build script.

The token-game exploration kernel is compiled with Cython when a compiler
and Cython are available; otherwise the install proceeds and the package
falls back to the pure-Python engine at import time.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-Python engine on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: could not build the compiled token-game kernel ({exc}); "
            "falling back to the pure-Python engine",
            file=sys.stderr,
        )


try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("cuta2bpmn._tokengame", ["src/cuta2bpmn/_tokengame.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
