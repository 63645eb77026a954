"""Konstanten für den SB-Ising-Solver."""

DOMAIN = "sb_ising"

# Konfigurationsabschnitte
SECTION_BENCH = "bench"
SECTION_SB = "sb"
SECTION_NOISE = "noise"
SECTION_HARDWARE = "hardware"
SECTION_DAC = "dac"
SECTION_GW = "gw"
SECTION_LOCAL_SEARCH = "local_search"

# Konfigurationsschlüssel [bench]
CONF_ENGINE = "engine"
CONF_INSTANCES = "instances"
CONF_NODES = "n"
CONF_DENSITY = "density"
CONF_COUNT = "count"
CONF_SEED = "seed"
CONF_TRIALS = "trials"
CONF_THRESHOLDS = "thresholds"
CONF_OUTPUT = "output"
CONF_TARGET_ACCURACY = "target_accuracy"

# Konfigurationsschlüssel [sb] / [noise]
CONF_ALPHA = "alpha"
CONF_BETA = "beta"
CONF_ITERATIONS = "iterations"
CONF_NOISE_KIND = "kind"
CONF_AMPLITUDE = "amplitude0"
CONF_DECAY_RATE = "decay_rate"
CONF_LEVELS = "levels"

# Konfigurationsschlüssel [sweep] (innerhalb [sb]/[noise] als Listen)
CONF_ALPHA_GRID = "alpha_grid"
CONF_BETA_GRID = "beta_grid"
CONF_AMPLITUDE_GRID = "amplitude0_grid"
CONF_DECAY_GRID = "decay_rate_grid"

# Engines
ENGINE_IDEAL = "ideal"
ENGINE_HARDWARE = "hardware"
ENGINES = (ENGINE_IDEAL, ENGINE_HARDWARE)

# Umgebungsvariable für die Worker-Anzahl
ENV_WORKERS = "SB_ISING_WORKERS"

# Standardwerte Ideal-Engine, per Sweep auf n=60, Dichte 0.5 abgestimmt
# (α/β-Verhältnis 10, Rauschen 3α, halbiert nach 4 Iterationen)
DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 0.1
DEFAULT_ITERATIONS = 20
DEFAULT_AMPLITUDE = 3.0
DEFAULT_DECAY_RATE = 0.25
DEFAULT_LEVELS = 16

# Standardwerte Benchmark
DEFAULT_TRIALS = 100
DEFAULT_THRESHOLDS = (0.90, 0.92, 0.95)
DEFAULT_TARGET_ACCURACY = 0.95
DEFAULT_NODES = 60
DEFAULT_DENSITY = 0.5
DEFAULT_WORKERS = 4

# Orakel
EXHAUSTIVE_NODE_CAP = 26
# Obergrenze für Knoten pro Instanz (Datei, Generator); dichte int8-Matrix ≤ 16 MiB
MAX_NODES = 4096
DEFAULT_LS_RESTARTS = 1000
DEFAULT_LS_FLIPS_PER_NODE = 10
DEFAULT_GW_ROUNDINGS = 100
DEFAULT_GW_MAX_ITERS = 500
DEFAULT_GW_STEP = 1.0

# Provenienz-Tags für Nenner
PROVENANCE_EXACT = "exact"
PROVENANCE_LOCAL_SEARCH = "local-search"
PROVENANCE_GW = "gw"

# Histogramm der Endgenauigkeit
HISTOGRAM_LOW = 0.80
HISTOGRAM_BIN = 0.01

# Ausgabedateien
MANIFEST_FILE = "manifest.json"
TRIALS_FILE = "trials.jsonl"
SUMMARY_FILE = "summary.csv"
REPORT_CSV = "report.csv"
REPORT_JSON = "report.json"
SWEEP_CSV = "sweep.csv"
SWEEP_BEST = "sweep_best.json"
INSTANCE_SUFFIX = ".ising"

# Exit-Codes
EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2
