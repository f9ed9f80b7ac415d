"""Build hook for the optional compiled Sturm kernel.

When Cython or a compiler is unavailable the package installs without
the extension and falls back to the numpy implementation at import.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "pdmsusy._sturm",
                ["src/pdmsusy/_sturm.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
