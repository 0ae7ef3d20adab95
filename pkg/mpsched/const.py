"""Constants for mpsched."""

NS_PER_SECOND = 1_000_000_000
NS_PER_MS = 1_000_000
NS_PER_US = 1_000

# Longest supported run; SimTime arithmetic stays exact well beyond this.
MAX_SIM_SECONDS = 10_000

DEFAULT_SIM_SECONDS = 50.0
DEFAULT_RUNS = 20
DEFAULT_BASE_SEED = 1
DEFAULT_PACKET_SIZE = 1000
DEFAULT_MSS = 934
ACK_SIZE = 40

MAX_PATHS = 8

DEFAULT_SIDE_DELAY_NS = 1 * NS_PER_MS
DEFAULT_SIDE_BANDWIDTH_FACTOR = 2.0
# Side links never congest in practice.
SIDE_QUEUE_BYTES = 1 << 26

QUEUE_RED = "red"
QUEUE_DROPTAIL = "droptail"
QUEUE_POLICIES = (QUEUE_RED, QUEUE_DROPTAIL)
RED_MIN_FRAC = 0.25
RED_MAX_FRAC = 0.75
RED_MAX_DROP_PROB = 0.1

RTO_MIN_NS = 200 * NS_PER_MS
RTO_INITIAL_NS = 1 * NS_PER_SECOND
RTO_MAX_NS = 60 * NS_PER_SECOND
DUPACK_THRESHOLD = 3
INITIAL_CWND_SEGMENTS = 2
INITIAL_SSTHRESH_BYTES = 1 << 30
SRTT_GAIN = 1 / 8
RTTVAR_GAIN = 1 / 4
THROUGHPUT_GAIN = 1 / 8

DEFAULT_SEND_BUFFER_SEGMENTS = 256

ESTIMATOR_HISTORY = 8
ESTIMATOR_ALPHA = 1 / 4
STALE_SRTT_MULTIPLE = 3

SCHEDULER_FIFO = "fifo"
SCHEDULER_FDPS = "fdps"
SCHEDULER_RTT_HALF = "rtt-half"
# Column order of the occupancy table.
SCHEDULER_NAMES = (SCHEDULER_FIFO, SCHEDULER_RTT_HALF, SCHEDULER_FDPS)

# Independent random stream ids within one run.
STREAM_SCHEDULER = 0
STREAM_QUEUE_BASE = 100

ENV_OUT_DIR = "MPSCHED_OUT"
DEFAULT_OUT_DIR = "results"

CATEGORY_DATA = "data"
CATEGORY_ACK = "ack"
CATEGORY_BACKGROUND = "background"
