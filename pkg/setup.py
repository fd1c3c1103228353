from setuptools import Extension, setup

# The compiled spinor-chain kernels are optional: without Cython the package
# installs pure-Python and scwfprep.kernels falls back at import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "scwfprep.kernels._chain",
                ["src/scwfprep/kernels/_chain.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
