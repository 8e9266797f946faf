
# Middlebury .flo
FLO_MAGIC_TAG = b"PIEH"
FLO_MAGIC = 202021.25

# raw tensor files: magic, u32 rank, u32 dims[rank], f32 payload, little-endian
RTF_MAGIC = b"RTF1"

PNM_MAXVAL = 255

# e^-1: a forward-backward residual of one pixel
DEFAULT_TAU_OCC = 0.368
# floor(d^2 / R) puts every target with d^2 < R at weight 1, so with flat scores
# R = 4 ties the whole 3x3 neighbourhood and argmax takes the lowest slot;
# only R <= 1 makes the weighted argmax pick the nearest target
DEFAULT_SPATIAL_RADIUS = 4.0

# exp(-700) is still a positive double
MAX_SQUARED_RESIDUAL = 700.0

INVALID_TARGET = -1

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_WINDOW = 8

E_WARP_SCALE = 1e3
E_INTER_SCALE = 255.0

PSNR_INF_SENTINEL = "inf"
