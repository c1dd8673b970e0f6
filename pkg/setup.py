from setuptools import setup

import flashsynth

with open('README.rst') as fp:
    README = fp.read()

setup(
    name='flashsynth',
    version=flashsynth.__version__,
    description='String transformation programs synthesized from input-output examples.',
    long_description=README,
    packages=['flashsynth'],
    license='MIT',
    install_requires=[
        "numpy",
        "lark",
        "GitPython",
        "configparser"
    ],
    entry_points={
        'console_scripts': ['flashsynth=flashsynth.cli:main'],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        ]
    )
