/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_autoplay_free: (a: number, b: number) => void;
export const autoplay_is_over: (a: number) => number;
export const autoplay_new: (a: bigint, b: number, c: number, d: number, e: number) => [number, number, number];
export const autoplay_play: (a: number, b: number, c: number) => [number, number, number, number];
export const autoplay_state: (a: number) => [number, number, number, number];
export const autoplay_step: (a: number) => [number, number, number, number];
export const autoplay_suggest: (a: number, b: number, c: number) => [number, number, number, number];
export const canonical_strategy: (a: number, b: number) => [number, number, number, number];
export const explore: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
