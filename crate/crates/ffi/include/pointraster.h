#ifndef POINTRASTER_H
#define POINTRASTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PrMethod {
  PR_METHOD_ATOMICMIN = 0,
  PR_METHOD_SPLAT = 1,
  PR_METHOD_BASELINE_STANDARD = 2,
  PR_METHOD_BASELINE_REVERSED = 3,
} PrMethod;

typedef enum PrScene {
  PR_SCENE_RANDOM_CUBE = 0,
  PR_SCENE_ZFIGHT_PLANES = 1,
  PR_SCENE_SPHERE_SHELL = 2,
} PrScene;

typedef enum PrStatus {
  PR_STATUS_OK = 0,
  PR_STATUS_NULL_POINTER = 1,
  PR_STATUS_INVALID_ARGUMENT = 2,
  PR_STATUS_DIMENSION_MISMATCH = 3,
  PR_STATUS_IO = 4,
  PR_STATUS_PARSE = 5,
  PR_STATUS_BUFFER_TOO_SMALL = 6,
  PR_STATUS_PANIC = 7,
} PrStatus;

typedef struct PrCloud PrCloud;

typedef struct PrMapper PrMapper;

typedef struct PrRenderer PrRenderer;

typedef struct PrDepthRange {
  double lo;
  double hi;
  double unit;
} PrDepthRange;

/**
 * Splat tolerance `epsilon_num / epsilon_den`, background as 0xRRGGBB, and
 * worker count (0 = available parallelism).
 */
typedef struct PrRenderOptions {
  uint64_t epsilon_num;
  uint64_t epsilon_den;
  uint32_t background_rgb;
  uint32_t workers;
} PrRenderOptions;

/**
 * Pinhole camera; `fov_y` in degrees. `near`/`far` are used by the baselines only.
 */
typedef struct PrCamera {
  double eye[3];
  double target[3];
  double up[3];
  double fov_y;
  uint32_t width;
  uint32_t height;
  double near;
  double far;
} PrCamera;

typedef struct PrRenderStats {
  uint64_t points_in;
  uint64_t fragments_written;
  /**
   * Up to three pass timings; unused entries are 0.
   */
  uint64_t pass_ns[3];
  uint32_t pass_count;
} PrRenderStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length plus one, so a
 * return value greater than `len` means truncation. `buf` may be null to
 * query the size.
 */
size_t pr_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pr_version(void);

/**
 * Packs a 40-bit depth index and 0xRRGGBB color into one 64-bit fragment.
 */
enum PrStatus pr_pack_fragment(uint64_t depth_index, uint32_t rgb, uint64_t *out_packed);

enum PrStatus pr_unpack_fragment(uint64_t packed, uint64_t *out_depth_index, uint32_t *out_rgb);

/**
 * The packed value of an empty framebuffer cell.
 */
uint64_t pr_clear_fragment(void);

enum PrStatus pr_mapper_uniform(double unit, struct PrMapper **out_mapper);

/**
 * Piecewise mapping over `count` contiguous ranges, ordered by `lo`.
 */
enum PrStatus pr_mapper_piecewise(const struct PrDepthRange *ranges,
                                  size_t count,
                                  struct PrMapper **out_mapper);

/**
 * Depth index for `depth` meters; `PR_STATUS_INVALID_ARGUMENT` when the
 * depth is outside the mapping.
 */
enum PrStatus pr_mapper_quantize(const struct PrMapper *mapper, double depth, uint64_t *out_index);

/**
 * Lower edge, in meters, of the bin with index `index`.
 */
enum PrStatus pr_mapper_reconstruct(const struct PrMapper *mapper,
                                    uint64_t index,
                                    double *out_depth);

void pr_mapper_free(struct PrMapper *mapper);

/**
 * Builds a cloud from `count` xyz triples and, when `rgb` is not null,
 * `count` RGB triples (otherwise white).
 */
enum PrStatus pr_cloud_from_arrays(const double *xyz,
                                   const uint8_t *rgb,
                                   size_t count,
                                   struct PrCloud **out_cloud);

/**
 * Reads a .las, .ply or .xyz file (UTF-8 path).
 */
enum PrStatus pr_cloud_load(const char *path, struct PrCloud **out_cloud);

/**
 * Synthetic scene with the generator's default extent, separation and distance.
 */
enum PrStatus pr_cloud_generate(enum PrScene scene,
                                uint64_t count,
                                uint64_t seed,
                                struct PrCloud **out_cloud);

/**
 * Number of points, or 0 for a null handle.
 */
size_t pr_cloud_len(const struct PrCloud *cloud);

void pr_cloud_free(struct PrCloud *cloud);

/**
 * Reusable framebuffers for `width` x `height` images.
 */
enum PrStatus pr_renderer_new(uint32_t width, uint32_t height, struct PrRenderer **out_renderer);

void pr_renderer_free(struct PrRenderer *renderer);

/**
 * Defaults: tolerance 101/100, black background, all available workers.
 */
struct PrRenderOptions pr_render_options_default(void);

/**
 * Renders `cloud` into `out_rgb` (row-major RGB8, top row first, at least
 * width*height*3 bytes). `mapper` null means 1 mm uniform; `options` null
 * means [`pr_render_options_default`]; `out_stats` may be null. The
 * camera's size must match the renderer's.
 */
enum PrStatus pr_render(struct PrRenderer *renderer,
                        enum PrMethod method,
                        const struct PrCloud *cloud,
                        const struct PrCamera *camera,
                        const struct PrMapper *mapper,
                        const struct PrRenderOptions *options,
                        uint8_t *out_rgb,
                        size_t out_len,
                        struct PrRenderStats *out_stats);

/**
 * Sequential reference image for `PR_METHOD_ATOMICMIN` or `PR_METHOD_SPLAT`,
 * bit-identical to [`pr_render`] for the same inputs.
 */
enum PrStatus pr_render_oracle(enum PrMethod method,
                               const struct PrCloud *cloud,
                               const struct PrCamera *camera,
                               const struct PrMapper *mapper,
                               const struct PrRenderOptions *options,
                               uint8_t *out_rgb,
                               size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POINTRASTER_H */
