"""Splitting precoding for fronthaul-limited massive MIMO downlink.

Subspace selection at the antenna system (GS-MRT / MRT / DFT), quantized
sum-MSE refinement at the baseband unit via exact sphere decoding with a
bisected power multiplier, plus Monte-Carlo sum-rate evaluation.
"""

__version__ = "0.1.0"

from .config import SystemConfig, MmWaveParams
from .channel import ChannelMatrix, gen_rayleigh, gen_mmwave
from .quantizer import (QuantizerSpec, midrise_quantize, quantize_complex,
                        calibrate_step, distortion_factor)
from .aas import AasPrecoder, EffectiveChannel, gs_mrt, mrt, dft_select, effective_channel
from .bbu import (ReceiverGains, ContinuousPrecoder, IlsProblem, BbuPrecoder,
                  qrzf, receiver_gains, build_ils, bbu_precode, one_stage_precode,
                  modifysd_objective)
from .sesd import sesd_solve
from .evaluation import (power_scale, sum_rate, sum_mse, run_sweep, Scheme,
                         default_schemes, calibrate_scheme, FronthaulBudget,
                         fronthaul_bits, SweepResult)
from .errors import (SplitPrecodeError, ConfigError, DegenerateChannelError,
                     DegenerateInputError, NotPositiveDefiniteError, SolverBudgetError)
