"""Joint detection and decoding of LDPC codes on partial-response channels.

The package splits along the natural seams of the problem:

``ldpc``      codes: alist I/O, GF(2) linear algebra, encoding
``channel``   partial-response targets, AWGN, the quadratic field expansion
``prbp``      the joint message-passing decoder on the combined graph
``baseline``  memoryless sum-product, BCJR detection, turbo equalization
``oracle``    brute-force posteriors, Bethe free energy, tree audits
``sim``       seeded Monte Carlo BER harness with operation accounting
``fixtures``  deterministic synthesis of the benchmark codes
``cli``       the ``prldpc`` command-line tool
"""

from .baseline import (
    SumProductDecoder,
    Trellis,
    TurboSchedule,
    bcjr,
    sum_product_decode,
    turbo_equalize,
)
from .channel import (
    ChannelCouplings,
    NoiseSpec,
    PrTarget,
    apply_rate_penalty,
    compute_couplings,
    log_likelihood,
    snr_to_sigma2,
    transmit,
    verify_expansion,
)
from .fixtures import (FIXTURES, fixture, fixture_path,
                       fixture_sha256, list_fixtures)
from .ldpc import (
    AlistError,
    GeneratorSpec,
    ParityCheckMatrix,
    code_info,
    derive_generator,
    encode,
    from_bipolar,
    gf2_rank,
    parse_alist,
    serialize_alist,
    syndrome,
    to_bipolar,
)
from .oracle import (
    beliefs_from_fields,
    bethe_free_energy,
    exact_belief_set,
    exact_marginals,
    oracle_check,
    random_tree_instance,
    run_to_fixed_point,
    stationarity_check,
)
from .prbp import (
    DecodeResult,
    IsiEdgeSet,
    JointDecoder,
    build_graph,
    decode,
    hard_decide,
)
from .rng import standard_normal, substream
from .sim import (
    BerRecord,
    OpCounter,
    SimConfig,
    load_code,
    measure_ops,
    predicted_ops,
    run_point,
    sweep,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "AlistError",
    "BerRecord",
    "ChannelCouplings",
    "DecodeResult",
    "FIXTURES",
    "GeneratorSpec",
    "IsiEdgeSet",
    "JointDecoder",
    "NoiseSpec",
    "OpCounter",
    "ParityCheckMatrix",
    "PrTarget",
    "SimConfig",
    "SumProductDecoder",
    "Trellis",
    "TurboSchedule",
    "apply_rate_penalty",
    "bcjr",
    "sum_product_decode",
    "beliefs_from_fields",
    "bethe_free_energy",
    "build_graph",
    "code_info",
    "compute_couplings",
    "decode",
    "derive_generator",
    "encode",
    "exact_belief_set",
    "exact_marginals",
    "fixture",
    "fixture_path",
    "fixture_sha256",
    "from_bipolar",
    "gf2_rank",
    "hard_decide",
    "list_fixtures",
    "load_code",
    "log_likelihood",
    "measure_ops",
    "oracle_check",
    "parse_alist",
    "predicted_ops",
    "random_tree_instance",
    "run_to_fixed_point",
    "run_point",
    "serialize_alist",
    "snr_to_sigma2",
    "stationarity_check",
    "substream",
    "standard_normal",
    "sweep",
    "syndrome",
    "to_bipolar",
    "transmit",
    "verify_expansion",
    "turbo_equalize",
    "wilson_interval",
]
