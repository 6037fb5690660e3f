"""Volume-constrained solid-on-solid crystal: sampling and facet analysis."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .model import HeightField, ModelParams, energy, vertical_plaquettes, volume
from .sampler import (ChainSample, SamplerConfig, default_height_bounds,
                      exact_distribution, init_field, metropolis_sweep,
                      run_chain, total_variation, transition_matrix,
                      volume_floor)
from .levelsets import (Contour, DegenerateFieldError, FacetReport, Section,
                        classify_contour, contours_of, erase, facet_level,
                        facet_report, fill_squares, level_set,
                        second_order_externals)
from .isoperimetry import (DropletTriple, HypothesisViolation, TransferReport,
                           certify_transfer, iso_decompose, min_perimeter,
                           min_perimeter_array, min_perimeter_oracle,
                           perimeter_gain, sqrt_bounds_check, sqrt_bounds_scan,
                           transfer_gain)
from .hairs import (Hair, ScaleTable, default_c1, extract_hairs,
                    max_deviation_in_f2, scale_table)
from .partitions import (YoungDiagram, enumerate_partitions, monolayer_constant,
                         monolayer_residual, profile_deviation,
                         quasicube_volume, sample_partition, sample_partitions,
                         solve_monolayer_x, vershik_curve,
                         vershik_symmetric_point, zeta3)
