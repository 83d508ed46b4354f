"""Primal-dual interior-point core for small dense SDPs.

Solves   min  C . X + clin . u
         s.t. A_i . X + B_i . u = b_i,   X >= 0 (PSD),  u >= 0,

with real symmetric data (complex Hermitian problems are embedded by the
caller).  The algorithm is a standard infeasible-start primal-dual method
with Nesterov-Todd scaling and a Mehrotra predictor-corrector; Newton
systems are reduced to an m x m Schur complement solved densely.  The
nonnegative block ``u`` carries interval slacks when measured-data
equalities are relaxed; it may be empty.

Data-constrained channel problems typically have optima on the boundary
of the cone, which makes the scaling point ill-conditioned near
convergence.  Accuracy there relies on keeping every product in the
factored scaled space (constraints appear only as R^T A_i R, so the Schur
complement is an exact Gram matrix), plus three safeguards: iterative
refinement of the Jacobi-scaled Schur solves, an explicit feasibility
correction of the final search direction, and a step guard with
best-iterate tracking so one bad late step can never degrade the result.

The whole iteration is one self-contained function written in
numba-compatible numpy: ``ipm_core`` is the (optionally) jit-compiled
entry point and ``ipm_core_python`` always the plain-numpy one, so the two
backends can be benchmarked against each other.  Everything is
deterministic: fixed initialization, no randomized pivoting.

Status codes: 0 = optimal, 1 = iteration limit, 2 = (apparently)
infeasible -- the primal residual stalled above 1e-5.
"""

from __future__ import annotations

import numpy as np

from .._accel import jit_kernel

STATUS_OPTIMAL = 0
STATUS_MAX_ITER = 1
STATUS_INFEASIBLE = 2


def _ipm_core_impl(Astack, B, b, C, clin, max_iter, tol_gap, tol_feas):
    m = Astack.shape[0]
    n = Astack.shape[1]
    p = clin.shape[0]
    nn = n * n
    Aflat = np.ascontiguousarray(Astack).reshape(m, nn)

    # Infeasible start: X satisfies the trace row exactly, S is centered
    # and scaled to the objective so the initial dual residual is modest.
    normc = 1.0 + np.sqrt(np.sum(C * C) + np.sum(clin * clin))
    s0 = 1.0 + np.sqrt(np.sum(C * C)) / np.sqrt(n)
    X = np.eye(n) * (2.0 / n)
    S = np.eye(n) * s0
    y = np.zeros(m)
    u = np.ones(p)
    z = np.ones(p)

    nu = float(n + p)
    normb = 1.0 + np.max(np.abs(b))
    eta = 0.98
    mu0 = (2.0 * s0 + p) / nu

    best_merit = 1e300
    Xb, ub, yb, Sb, zb = X.copy(), u.copy(), y.copy(), S.copy(), z.copy()
    best_gap = 1e300
    best_pres = 1e300
    best_dres = 1e300

    iters = 0
    small_steps = 0
    converged = False

    while True:
        # Residuals and optimality measures at the current iterate.
        xflat = np.ascontiguousarray(X).reshape(nn)
        ax = Aflat @ xflat
        if p > 0:
            ax = ax + B @ u
        rp = b - ax
        Rd = C - S
        for i in range(m):
            Rd = Rd - y[i] * Astack[i]
        if p > 0:
            rdl = clin - z - B.T @ y
        else:
            rdl = np.zeros(0)
        gap_xs = np.sum(X * S)
        if p > 0:
            gap_xs += np.sum(u * z)
        mu = gap_xs / nu
        pobj = np.sum(C * X)
        if p > 0:
            pobj += np.sum(clin * u)
        dobj = np.dot(b, y)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pres = np.max(np.abs(rp)) / normb
        dres = np.sqrt(np.sum(Rd * Rd) + np.sum(rdl * rdl)) / normc

        merit = max(relgap, max(pres, dres))
        if merit < best_merit:
            best_merit = merit
            Xb = X.copy()
            ub = u.copy()
            yb = y.copy()
            Sb = S.copy()
            zb = z.copy()
            best_gap = relgap
            best_pres = pres
            best_dres = dres

        if pres <= tol_feas and dres <= tol_feas and relgap <= tol_gap:
            converged = True
            break
        if iters >= max_iter or small_steps >= 3:
            break

        # Nesterov-Todd scaling: R with R^-1 X R^-T = R^T S R = diag(sig).
        ex, Qx = np.linalg.eigh(X)
        es, Qs = np.linalg.eigh(S)
        Lx = Qx * np.sqrt(np.maximum(ex, 1e-300))
        Ls = Qs * np.sqrt(np.maximum(es, 1e-300))
        Uv, sv, Vt = np.linalg.svd(Ls.T @ Lx)
        sig = np.maximum(sv, 1e-300)
        R = (Lx @ Vt.T) * (1.0 / np.sqrt(sig))
        if p > 0:
            wlin = np.sqrt(u / z)
            wlin2 = u / z
            lamlin = np.sqrt(u * z)
        else:
            wlin = np.zeros(0)
            wlin2 = np.zeros(0)
            lamlin = np.zeros(0)

        # Constraints in the scaled space: At_i = R^T A_i R.  All Schur
        # quantities are assembled from these, so the Schur complement is
        # an exact Gram matrix and no product ever carries the squared
        # conditioning of the scaling point.
        Atil = np.empty((m, nn))
        for i in range(m):
            T = R.T @ Astack[i] @ R
            Atil[i] = np.ascontiguousarray(0.5 * (T + T.T)).reshape(nn)
        H = Atil @ Atil.T
        if p > 0:
            H = H + (B * wlin2) @ B.T
        # Jacobi-scaled, lightly ridged factorization; iterative refinement
        # against the unscaled system recovers the remaining accuracy.
        dh = 1.0 / np.sqrt(np.maximum(np.diag(H), 1e-280))
        Hs = (H * dh).T * dh
        Hs = 0.5 * (Hs + Hs.T)
        for i in range(m):
            Hs[i, i] += 1e-14

        Rdtil = R.T @ Rd @ R
        Rdtil = 0.5 * (Rdtil + Rdtil.T)
        ard = Atil @ np.ascontiguousarray(Rdtil).reshape(nn)
        if p > 0:
            ard = ard + B @ (wlin2 * rdl)

        # --- predictor (affine scaling) direction ---------------------
        # Complementarity target sym(Sig (Dx + Ds)) = -Sig^2 collapses to
        # Dx + Ds = -diag(sig).
        G = np.zeros((n, n))
        for i in range(n):
            G[i, i] = -sig[i]
        g = -lamlin

        agv = Atil @ np.ascontiguousarray(G).reshape(nn)
        if p > 0:
            agv = agv + B @ (wlin * g)
        rhs = rp - agv + ard
        dy = dh * np.linalg.solve(Hs, dh * rhs)
        for _ in range(3):
            dy = dy + dh * np.linalg.solve(Hs, dh * (rhs - H @ dy))
        Ds = Rdtil.copy()
        for i in range(m):
            Ds = Ds - dy[i] * Atil[i].reshape(n, n)
        Dx = G - Ds
        if p > 0:
            dz = rdl - B.T @ dy
            Dzl = wlin * dz
            Dxl = g - Dzl
        else:
            dz = np.zeros(0)
            Dzl = np.zeros(0)
            Dxl = np.zeros(0)

        # Steps to the cone boundary, in scaled coordinates.
        isq = 1.0 / np.sqrt(sig)
        scale = np.outer(isq, isq)
        lmin_x = np.linalg.eigvalsh(Dx * scale)[0]
        lmin_s = np.linalg.eigvalsh(Ds * scale)[0]
        ap_b = -1.0 / lmin_x if lmin_x < -1e-14 else 1e300
        ad_b = -1.0 / lmin_s if lmin_s < -1e-14 else 1e300
        if p > 0:
            for k in range(p):
                if Dxl[k] < 0.0:
                    ap_b = min(ap_b, -lamlin[k] / Dxl[k])
                if Dzl[k] < 0.0:
                    ad_b = min(ad_b, -lamlin[k] / Dzl[k])
        ap_aff = min(1.0, ap_b)
        ad_aff = min(1.0, ad_b)

        SigM = np.diag(sig)
        E1 = SigM + ap_aff * Dx
        E2 = SigM + ad_aff * Ds
        gxs = np.sum(E1 * E2)
        if p > 0:
            gxs += np.dot(lamlin + ap_aff * Dxl, lamlin + ad_aff * Dzl)
        mu_aff = gxs / nu
        ratio = mu_aff / mu if mu > 0.0 else 0.0
        if ratio < 0.0:
            ratio = 0.0
        sigma = min(1.0, ratio * ratio * ratio)
        # Keep complementarity from racing far ahead of feasibility: once
        # mu collapses, the scaling point degenerates and directions lose
        # the accuracy needed to finish driving the residuals down.
        feas = max(pres, dres)
        if mu > 0.0:
            sigma_floor = 0.01 * feas * mu0 / mu
            if sigma_floor > 0.5:
                sigma_floor = 0.5
            if sigma < sigma_floor:
                sigma = sigma_floor

        # --- corrector (centering + second order) direction -----------
        DxDs = Dx @ Ds
        Cc = -0.5 * (DxDs + DxDs.T)
        for i in range(n):
            Cc[i, i] += sigma * mu - sig[i] * sig[i]
        denom = sig.reshape(n, 1) + sig.reshape(1, n)
        G2 = 2.0 * Cc / denom
        if p > 0:
            rc = sigma * mu - lamlin * lamlin - Dxl * Dzl
            g2 = rc / lamlin
        else:
            g2 = np.zeros(0)

        agv2 = Atil @ np.ascontiguousarray(G2).reshape(nn)
        if p > 0:
            agv2 = agv2 + B @ (wlin * g2)
        rhs2 = rp - agv2 + ard
        dy2 = dh * np.linalg.solve(Hs, dh * rhs2)
        for _ in range(3):
            dy2 = dy2 + dh * np.linalg.solve(Hs, dh * (rhs2 - H @ dy2))
        dS2 = Rd.copy()
        for i in range(m):
            dS2 = dS2 - dy2[i] * Astack[i]
        Ds2 = Rdtil.copy()
        for i in range(m):
            Ds2 = Ds2 - dy2[i] * Atil[i].reshape(n, n)
        Dx2 = G2 - Ds2
        if p > 0:
            dz2 = rdl - B.T @ dy2
            Dzl2 = wlin * dz2
            Dxl2 = g2 - Dzl2
            du2 = wlin * Dxl2
        else:
            dz2 = np.zeros(0)
            Dzl2 = np.zeros(0)
            Dxl2 = np.zeros(0)
            du2 = np.zeros(0)

        dX2 = R @ Dx2 @ R.T
        dX2 = 0.5 * (dX2 + dX2.T)

        # Feasibility correction: remove the numerical error of
        # A(dX) - rp with one more (small-rhs) Schur solve, applied in the
        # scaled space so the cone step stays consistent.
        axd = Aflat @ np.ascontiguousarray(dX2).reshape(nn)
        if p > 0:
            axd = axd + B @ du2
        errv = axd - rp
        qy = dh * np.linalg.solve(Hs, dh * errv)
        qy = qy + dh * np.linalg.solve(Hs, dh * (errv - H @ qy))
        Mq = np.zeros((n, n))
        for i in range(m):
            Mq = Mq + qy[i] * Atil[i].reshape(n, n)
        Dx2 = Dx2 - Mq
        dX2 = R @ Dx2 @ R.T
        dX2 = 0.5 * (dX2 + dX2.T)
        if p > 0:
            du2 = du2 - wlin2 * (B.T @ qy)
            for k in range(p):
                Dxl2[k] = du2[k] / wlin[k] if wlin[k] > 0 else 0.0

        lmin_x2 = np.linalg.eigvalsh(Dx2 * scale)[0]
        lmin_s2 = np.linalg.eigvalsh(Ds2 * scale)[0]
        ap_b2 = -1.0 / lmin_x2 if lmin_x2 < -1e-14 else 1e300
        ad_b2 = -1.0 / lmin_s2 if lmin_s2 < -1e-14 else 1e300
        if p > 0:
            for k in range(p):
                if Dxl2[k] < 0.0:
                    ap_b2 = min(ap_b2, -lamlin[k] / Dxl2[k])
                if Dzl2[k] < 0.0:
                    ad_b2 = min(ad_b2, -lamlin[k] / Dzl2[k])
        ap = min(1.0, eta * ap_b2)
        ad = min(1.0, eta * ad_b2)

        # Step quality guard: a direction that would blow up feasibility
        # or complementarity is halved; noise below tolerance is fine.
        accepted = False
        Xn = X
        Sn = S
        un = u
        zn = z
        for _ in range(40):
            Xn = X + ap * dX2
            Sn = S + ad * dS2
            xet = np.ascontiguousarray(Xn).reshape(nn)
            axn = Aflat @ xet
            if p > 0:
                un = u + ap * du2
                zn = z + ad * dz2
                axn = axn + B @ un
            presn = np.max(np.abs(b - axn)) / normb
            gxsn = np.sum(Xn * Sn)
            if p > 0:
                gxsn += np.sum(un * zn)
            mun = gxsn / nu
            if presn <= max(1.5 * pres, 0.3 * tol_feas) and 0.0 < mun <= 1.5 * mu:
                accepted = True
                break
            ap *= 0.5
            ad *= 0.5
        if not accepted:
            break

        X = 0.5 * (Xn + Xn.T)
        S = 0.5 * (Sn + Sn.T)
        y = y + ad * dy2
        if p > 0:
            u = un
            z = zn

        if ap < 1e-10 and ad < 1e-10:
            small_steps += 1
        else:
            small_steps = 0
        iters += 1

    if not converged:
        # fall back to the best iterate seen
        X, u, y, S, z = Xb, ub, yb, Sb, zb
        relgap, pres, dres = best_gap, best_pres, best_dres
        if pres <= tol_feas and dres <= tol_feas and relgap <= tol_gap:
            converged = True

    if converged:
        status = STATUS_OPTIMAL
    elif pres > 1e-5:
        status = STATUS_INFEASIBLE
    else:
        status = STATUS_MAX_ITER
    return X, u, y, S, z, iters, relgap, pres, dres, status


ipm_core_python = _ipm_core_impl
ipm_core = jit_kernel(_ipm_core_impl)
