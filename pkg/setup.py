from setuptools import Extension, setup

# The compiled kernels are optional: if Cython (or a C compiler) is not
# available the package falls back to the pure-Python implementation.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("longwire._core", ["src/longwire/_core.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
