/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The scrambled pieces with `width` boundary pixels zeroed.
     */
    erosion_preview(width: number): Image;
    constructor(rgba: Uint8Array, width: number, height: number);
    piece_count(): number;
    /**
     * Score matrix of one relation, pieces in their true order; the bright
     * band just above the diagonal marks true right-hand neighbors.
     */
    score_map(measure: string, anchor: string, candidate: string): Image;
    /**
     * Cuts the source into `piece_size` squares and shuffles them; with
     * `rotate`, each piece is also turned by a random quarter. Returns the
     * pieces laid out in their shuffled order.
     */
    scramble(piece_size: number, rotate: boolean, seed: number): Image;
    /**
     * Runs the genetic solver on scores from `measure` (`ssd-rgb`, `mgc`,
     * `oracle`, ...) computed on pieces eroded by `erosion` pixels.
     */
    solve(measure: string, erosion: number, seed: number, unknown_dims: boolean): SolveSummary;
    source(): Image;
    /**
     * A demo on a generated image.
     */
    static synthetic(width: number, height: number, seed: number): Demo;
}

export class Image {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Copies the pixels out as RGBA bytes.
     */
    rgba(): Uint8Array;
    readonly height: number;
    readonly width: number;
}

export class SolveSummary {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The solved image.
     */
    image(): Image;
    readonly accuracy: number;
    readonly fitness: number;
    readonly generations: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_image_free: (a: number, b: number) => void;
    readonly __wbg_solvesummary_free: (a: number, b: number) => void;
    readonly demo_erosion_preview: (a: number, b: number) => [number, number, number];
    readonly demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_piece_count: (a: number) => number;
    readonly demo_score_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly demo_scramble: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_solve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly demo_source: (a: number) => number;
    readonly demo_synthetic: (a: number, b: number, c: number) => number;
    readonly image_height: (a: number) => number;
    readonly image_rgba: (a: number) => [number, number];
    readonly image_width: (a: number) => number;
    readonly solvesummary_accuracy: (a: number) => number;
    readonly solvesummary_fitness: (a: number) => number;
    readonly solvesummary_generations: (a: number) => number;
    readonly solvesummary_image: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
