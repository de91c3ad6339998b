/* tslint:disable */
/* eslint-disable */

/**
 * One deal between two configured teams, stepped from the page.
 */
export class Autoplay {
    free(): void;
    [Symbol.dispose](): void;
    is_over(): boolean;
    constructor(seed: bigint, hand_team: string, deck_team: string);
    /**
     * Plays a move written as in the legal list (`"7d"`, `"7d x 3s 4c"`)
     * for the seat to act.
     */
    play(text: string): string;
    /**
     * Full open-hand state for the spectator view, plus the score
     * breakdown once the deal is over.
     */
    state(): string;
    /**
     * Lets the configured strategy of the seat to act move; returns the
     * move as JSON, or `null` once the deal is over.
     */
    step(): string;
    /**
     * What `strategy` would play for the seat to act, without playing it.
     */
    suggest(strategy: string): string;
}

/**
 * Validates a strategy string and returns its canonical form.
 */
export function canonical_strategy(s: string): string;

/**
 * Capture explorer: every legal move for `hand` against `table`, both
 * given as card lists like `"7d Ks 3c"`. A move that clears the table is
 * flagged as a scopa (the engine withholds it on the very last play).
 */
export function explore(hand: string, table: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_autoplay_free: (a: number, b: number) => void;
    readonly autoplay_is_over: (a: number) => number;
    readonly autoplay_new: (a: bigint, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly autoplay_play: (a: number, b: number, c: number) => [number, number, number, number];
    readonly autoplay_state: (a: number) => [number, number, number, number];
    readonly autoplay_step: (a: number) => [number, number, number, number];
    readonly autoplay_suggest: (a: number, b: number, c: number) => [number, number, number, number];
    readonly canonical_strategy: (a: number, b: number) => [number, number, number, number];
    readonly explore: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
