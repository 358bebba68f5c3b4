from setuptools import setup

DISTNAME = 'cutfem'
DESCRIPTION = 'Cut finite element Poisson solver with face, extension and nodal ghost penalty stabilizations'
LONG_DESCRIPTION = open('README.md').read()
VERSION = '0.1.0'

setup(
    name=DISTNAME,
    description=DESCRIPTION,
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    version=VERSION,
    #Tests live in cutfem/tests and are installed with the package.
    packages=['cutfem', 'cutfem.tests'],
    install_requires=[
          'numpy',
          'scipy',
          'colorama',
    ],
    python_requires = '>=3.8',
    entry_points={
        'console_scripts': ['cutfem=cutfem.cli:main'],
    },
)
