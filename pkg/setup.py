from pathlib import Path

from setuptools import setup, find_packages

# Load the version from file
__version__ = Path("VERSION").read_text().strip()

setup(
  name = 'noma-pairing',
  packages = find_packages(exclude=['scripts', 'scripts.*']),
  include_package_data=True,
  version = __version__,
  license='MIT',
  description = 'NOMA Pairing - user pairing probabilities for fixed power and cognitive radio inspired NOMA, with Monte Carlo validation',
  long_description_content_type = 'text/markdown',
  keywords = [
    'non-orthogonal multiple access',
    'user pairing',
    'order statistics',
    'outage probability',
    'monte carlo',
  ],
  install_requires=[
    'torch',
    'numpy',
    'scipy',
    'tqdm',
    'beartype',
    'joblib',
  ],
  extras_require={
    'test': ['pytest', 'mpmath'],
  },
  entry_points={
    'console_scripts': ['noma-pairing = noma_pairing.cli:main'],
  },
  classifiers=[
    'Development Status :: 4 - Beta',
    'Intended Audience :: Science/Research',
    'Topic :: Scientific/Engineering :: Mathematics',
    'License :: OSI Approved :: MIT License',
    'Programming Language :: Python :: 3.10',
  ],
)
