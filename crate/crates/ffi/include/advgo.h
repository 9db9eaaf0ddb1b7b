#ifndef ADVGO_H
#define ADVGO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AdvgoStatus {
  ADVGO_STATUS_OK = 0,
  ADVGO_STATUS_NULL_POINTER = 1,
  ADVGO_STATUS_INVALID_ARGUMENT = 2,
  ADVGO_STATUS_ILLEGAL_MOVE = 3,
  ADVGO_STATUS_BUFFER_TOO_SMALL = 4,
  ADVGO_STATUS_IO = 5,
  ADVGO_STATUS_PARSE = 6,
  ADVGO_STATUS_AGENT = 7,
  ADVGO_STATUS_PANIC = 8,
} AdvgoStatus;

/**
 * Board colours; `Empty` is only used for board contents.
 */
typedef enum AdvgoColor {
  ADVGO_COLOR_EMPTY = 0,
  ADVGO_COLOR_BLACK = 1,
  ADVGO_COLOR_WHITE = 2,
} AdvgoColor;

/**
 * A move-choosing agent built from a descriptor string, with its own RNG.
 */
typedef struct AdvgoAgent AdvgoAgent;

/**
 * A game in progress (rules, position and history).
 */
typedef struct AdvgoGame AdvgoGame;

/**
 * A policy/value network checkpoint.
 */
typedef struct AdvgoNetwork AdvgoNetwork;

/**
 * Tromp-Taylor score; `white_points` includes komi.
 */
typedef struct AdvgoScore {
  double black_points;
  double white_points;
  /**
   * Winner, or `Empty` for a draw.
   */
  enum AdvgoColor winner;
} AdvgoScore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or NULL. The
 * pointer stays valid until the next call into the library on this thread.
 */
const char *advgo_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void advgo_string_free(char *s);

/**
 * Start an empty game on a `size` x `size` board.
 *
 * # Safety
 * `game_out` must be a valid pointer to writable storage.
 */
enum AdvgoStatus advgo_game_new(uint32_t size, double komi, struct AdvgoGame **game_out);

/**
 * Load a game (setup stones plus main-line moves) from SGF text.
 *
 * # Safety
 * `sgf` must be a NUL-terminated string; `game_out` must be writable.
 */
enum AdvgoStatus advgo_game_from_sgf(const char *sgf, struct AdvgoGame **game_out);

/**
 * Release a game.
 *
 * # Safety
 * `game` must be NULL or a handle from this library not yet freed.
 */
void advgo_game_free(struct AdvgoGame *game);

/**
 * Board side length, or 0 for a NULL handle.
 *
 * # Safety
 * `game` must be NULL or a live handle.
 */
uint32_t advgo_game_size(const struct AdvgoGame *game);

/**
 * Colour to move.
 *
 * # Safety
 * `game` must be a live handle; `color_out` must be writable.
 */
enum AdvgoStatus advgo_game_to_move(const struct AdvgoGame *game, enum AdvgoColor *color_out);

/**
 * Whether the game has ended (two consecutive passes or the turn limit).
 *
 * # Safety
 * `game` must be a live handle; `terminal_out` must be writable.
 */
enum AdvgoStatus advgo_game_is_terminal(const struct AdvgoGame *game, bool *terminal_out);

/**
 * Whether `vertex` is a legal move for the side to move.
 *
 * # Safety
 * `game` must be a live handle; `legal_out` must be writable.
 */
enum AdvgoStatus advgo_game_is_legal(const struct AdvgoGame *game,
                                     uint32_t vertex_index,
                                     bool *legal_out);

/**
 * Play `vertex` for the side to move; the game is unchanged on failure.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum AdvgoStatus advgo_game_play(struct AdvgoGame *game, uint32_t vertex_index);

/**
 * Copy the board (`size * size` entries, row-major) into `board_out`.
 *
 * # Safety
 * `game` must be a live handle; `board_out` must hold `len` entries.
 */
enum AdvgoStatus advgo_game_board(const struct AdvgoGame *game,
                                  enum AdvgoColor *board_out,
                                  size_t len);

/**
 * Tromp-Taylor score of the current position.
 *
 * # Safety
 * `game` must be a live handle; `score_out` must be writable.
 */
enum AdvgoStatus advgo_game_score(const struct AdvgoGame *game, struct AdvgoScore *score_out);

/**
 * Serialize the game as SGF; free the result with [`advgo_string_free`].
 *
 * # Safety
 * `game` must be a live handle; `sgf_out` must be writable.
 */
enum AdvgoStatus advgo_game_to_sgf(const struct AdvgoGame *game, char **sgf_out);

/**
 * Mark (1) every stone of `color` in a pass-alive chain, 0 elsewhere.
 *
 * # Safety
 * `game` must be a live handle; `mask_out` must hold `len` bytes.
 */
enum AdvgoStatus advgo_pass_alive_stones(const struct AdvgoGame *game,
                                         enum AdvgoColor color,
                                         uint8_t *mask_out,
                                         size_t len);

/**
 * Mark (1) every empty point of `color`'s pass-alive territory.
 *
 * # Safety
 * `game` must be a live handle; `mask_out` must hold `len` bytes.
 */
enum AdvgoStatus advgo_pass_alive_territory(const struct AdvgoGame *game,
                                            enum AdvgoColor color,
                                            uint8_t *mask_out,
                                            size_t len);

/**
 * Load a network checkpoint from `path`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `net_out` must be writable.
 */
enum AdvgoStatus advgo_network_load(const char *path, struct AdvgoNetwork **net_out);

/**
 * Release a network.
 *
 * # Safety
 * `net` must be NULL or a handle from this library not yet freed.
 */
void advgo_network_free(struct AdvgoNetwork *net);

/**
 * Evaluate the game position: writes the value (side to move's
 * perspective, in [-1, 1]) and the move distribution over `size*size + 1`
 * entries (pass last).
 *
 * # Safety
 * Handles must be live; `value_out` writable; `policy_out` must hold `len`
 * doubles.
 */
enum AdvgoStatus advgo_network_evaluate(const struct AdvgoNetwork *net,
                                        const struct AdvgoGame *game,
                                        double *value_out,
                                        double *policy_out,
                                        size_t len);

/**
 * Build an agent from a descriptor such as `spiral`, `net:v.bin,visits=64`
 * or `adversary:a.bin,victim=v.bin,mode=S`.
 *
 * # Safety
 * `descriptor` must be a NUL-terminated string; `agent_out` writable.
 */
enum AdvgoStatus advgo_agent_new(const char *descriptor,
                                 uint64_t seed,
                                 struct AdvgoAgent **agent_out);

/**
 * Release an agent.
 *
 * # Safety
 * `agent` must be NULL or a handle from this library not yet freed.
 */
void advgo_agent_free(struct AdvgoAgent *agent);

/**
 * Tell the agent a new game is starting.
 *
 * # Safety
 * `agent` must be a live handle.
 */
enum AdvgoStatus advgo_agent_new_game(struct AdvgoAgent *agent);

/**
 * Ask the agent for a move in the game position (the game is not
 * modified).
 *
 * # Safety
 * Handles must be live; `vertex_out` writable.
 */
enum AdvgoStatus advgo_agent_select_move(struct AdvgoAgent *agent,
                                         const struct AdvgoGame *game,
                                         uint32_t *vertex_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADVGO_H */
