from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rtwl.kernel._sweep_cy",
                ["src/rtwl/kernel/_sweep_cy.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python install still works; the kernel package falls back at import.
    ext_modules = []

setup(ext_modules=ext_modules)
