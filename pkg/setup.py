#!/usr/bin/env python

from setuptools import find_packages, setup

setup(
    name='contact-mech',
    # This tag is automatically updated by bumpversion
    version='0.1.0',
    description='Contact Hamiltonian and Herglotz dynamics, Tulczyjew triples and Legendre transformations',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    license='MIT',
    packages=find_packages(exclude=['test', 'test.*']),
    python_requires='>=3.10',
    install_requires=[
        'numpy',
        'cloudpathlib',
        'toml',
        'frozendict',
    ],
    extras_require={
        'test': [
            'pytest',
            'pytest-cov',
            'hypothesis',
        ],
    },
    entry_points={
        'console_scripts': ['contact-mech = contact_mech.cli:main'],
    },
    keywords='contact geometry, dissipative mechanics, thermodynamics',
    classifiers=[
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Operating System :: MacOS :: MacOS X',
        'Operating System :: POSIX',
        'Operating System :: Unix',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
    ],
)
