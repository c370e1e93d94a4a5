/**
 * Gradient attacks against the true model.
 *
 * The fast gradient method moves the full budget along the negative signed
 * gradient; the projected variant iterates it, re-projecting radially onto
 * the epsilon sphere around the original point after every step, and reads
 * fresh gradients at each iterate.
 */

import { ScalarModel, logitAndGradient } from "./model";

function norm(v: number[]): number {
    let s = 0;
    for (const x of v) s += x * x;
    return Math.sqrt(s);
}

/** -epsilon * sign(f) * grad / ||grad||; the zero vector if the gradient vanishes. */
export function fgmFromLinearization(f: number, grad: number[], epsilon: number): number[] {
    const g = norm(grad);
    if (g === 0) return grad.map(() => 0);
    const scale = (-epsilon * (f >= 0 ? 1 : -1)) / g;
    return grad.map((x) => scale * x);
}

export function fgmVector(sm: ScalarModel, x: number[], epsilon: number): number[] {
    const { f, grad } = logitAndGradient(sm, x);
    return fgmFromLinearization(f, grad, epsilon);
}

export function pgdVector(
    sm: ScalarModel,
    x: number[],
    epsilon: number,
    iters: number,
): number[] {
    let p = [...x];
    for (let j = 0; j < iters; j++) {
        const { f, grad } = logitAndGradient(sm, p);
        const step = fgmFromLinearization(f, grad, epsilon);
        const delta = p.map((pi, i) => pi + step[i] - x[i]);
        const dn = norm(delta);
        if (dn <= 1e-9 * epsilon) continue; // returned to the center: stay put
        const scale = epsilon / dn;
        p = x.map((xi, i) => xi + scale * delta[i]);
    }
    return p.map((pi, i) => pi - x[i]);
}
