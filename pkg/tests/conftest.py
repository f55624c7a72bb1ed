"""Test wiring: load cgatcore's default parameters so that helpers
such as ``P.get_temp_dir`` can be called before a pipeline runs."""

import cgatcore.pipeline as P

P.get_parameters()
