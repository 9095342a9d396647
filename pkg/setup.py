from setuptools import setup
setup(
        name = 'memsys_evo',
        packages = ['memsys_evo'],
        version = '0.1.0',
        description = 'System-level multi-objective optimization of embedded memory compiler parameters',
        license = 'Apache License 2.0',
        python_requires='>=3.8, <4',
        install_requires=[
                'matplotlib>=3.3',
                'numpy>=1.22',
                'requests'
            ],
        entry_points={
            'console_scripts': [
                'memsys-evo = memsys_evo.cli:main'
            ]},
        keywords = ['EDA', 'memory compiler', 'differential evolution',
                    'NSGA-II', 'Pareto'],
        classifiers = [
            'Development Status :: 3 - Alpha',
            'License :: OSI Approved :: Apache Software License',
            'Operating System :: POSIX :: Linux',
            'Programming Language :: Python :: 3.8',
            'Programming Language :: Python :: 3.9',
            'Programming Language :: Python :: 3.10',
            'Topic :: Scientific/Engineering :: Electronic Design Automation (EDA)'],
        )
