"""Build hook for the optional compiled kernels.

If Cython or a C compiler is missing the package still installs and
``tfqkd.kernels`` falls back to the pure-Python implementation.
"""
from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("tfqkd._ckernels", ["src/tfqkd/_ckernels.pyx"],
                   include_dirs=[numpy.get_include()],
                   extra_compile_args=["-O3"],
                   optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
