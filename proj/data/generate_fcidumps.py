#!/usr/bin/env python3
"""Regenerate the reference FCIDUMP files shipped in data/.

Requires PySCF. Every file is written with 17 significant digits so the
values parse back to the identical doubles.
"""
import re
import sys
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, lo, mcscf, scf, symm
from pyscf.tools import fcidump

OUT = Path(__file__).resolve().parent
FMT = " %.17g"

BENZENE = """
C 0.000000 1.396602 0.000000
C 0.000000 -1.396602 0.000000
C 1.209493 0.698301 0.000000
C 1.209493 -0.698301 0.000000
C -1.209493 0.698301 0.000000
C -1.209493 -0.698301 0.000000
H 0.000000 2.483720 0.000000
H 0.000000 -2.483720 0.000000
H 2.150965 1.241860 0.000000
H 2.150965 -1.241860 0.000000
H -2.150965 1.241860 0.000000
H -2.150965 -1.241860 0.000000
"""

NAPHTHALENE = """
C 0.000000 0.000000 0.717063
C 0.000000 0.000000 -0.717063
C 0.000000 1.244791 1.402547
C 0.000000 1.244791 -1.402547
C 0.000000 -1.244791 1.402547
C 0.000000 -1.244791 -1.402547
C 0.000000 2.433546 0.708438
C 0.000000 2.433546 -0.708438
C 0.000000 -2.433546 0.708438
C 0.000000 -2.433546 -0.708438
H 0.000000 1.242227 2.490221
H 0.000000 1.242227 -2.490221
H 0.000000 -1.242227 2.490221
H 0.000000 -1.242227 -2.490221
H 0.000000 3.378258 1.245514
H 0.000000 3.378258 -1.245514
H 0.000000 -3.378258 1.245514
H 0.000000 -3.378258 -1.245514
"""


def dump(path, h1, eri, ecore, norb, nelec, ms2, orbsym, isym=1):
    fcidump.from_integrals(str(path), h1, eri, norb, nelec, nuc=ecore, ms=ms2,
                           orbsym=orbsym, float_format=FMT)
    if isym != 1:
        text = path.read_text()
        path.write_text(re.sub(r"ISYM=\s*1,", f"ISYM={isym},", text, count=1))
    print(f"wrote {path.name}")


def casci_integrals(mf, mo_core, mo_act):
    """Frozen-core effective one-electron integrals and (ij|kl) over mo_act."""
    mol = mf.mol
    dm_core = 2.0 * mo_core @ mo_core.T
    vj, vk = mf.get_jk(mol, dm_core)
    hcore = mf.get_hcore()
    ecore = mol.energy_nuc() + np.einsum("ij,ji", dm_core, hcore + 0.5 * (vj - 0.5 * vk))
    h1 = mo_act.T @ (hcore + vj - 0.5 * vk) @ mo_act
    eri = ao2mo.restore(1, ao2mo.full(mol, mo_act), mo_act.shape[1])
    return h1, eri, ecore


def molpro_syms(mol, orbsym):
    group = mol.groupname
    if group in ("Dooh", "Coov"):
        group, orbsym = "D2h", np.asarray(orbsym) % 10
    return [fcidump.ORBSYM_MAP[group][i] for i in orbsym]


def h2():
    mol = gto.M(atom="H 0 0 0; H 0 0 0.735", basis="sto-3g", symmetry=True)
    mf = scf.RHF(mol).run()
    h1, eri, ecore = casci_integrals(mf, mf.mo_coeff[:, :0], mf.mo_coeff)
    dump(OUT / "h2.fcidump", h1, eri, ecore, 2, 2, 0, molpro_syms(mol, mf.orbsym))


def h2o():
    # Point-group labels are dropped: every (3a,3b) determinant shares the
    # reference label, giving the 100-determinant pool used by the baseline.
    mol = gto.M(atom="O 0 0 0.1173; H 0 0.7572 -0.4692; H 0 -0.7572 -0.4692",
                basis="sto-3g", symmetry=False)
    mf = scf.RHF(mol).run()
    h1, eri, ecore = casci_integrals(mf, mf.mo_coeff[:, :2], mf.mo_coeff[:, 2:7])
    dump(OUT / "h2o.fcidump", h1, eri, ecore, 5, 6, 0, None)


def pi_space(geom, n_pi):
    mol = gto.M(atom=geom, basis="sto-3g", symmetry="D2h")
    mf = scf.RHF(mol).run()
    # pi orbitals are odd under the molecular-plane reflection.
    plane_normal = np.argmin(np.ptp(mol.atom_coords(), axis=0))
    odd = {0: {"B3u", "B2g", "B1g", "Au"}, 1: {"B2u", "B3g", "B1g", "Au"},
           2: {"B1u", "B2g", "B3g", "Au"}}[plane_normal]
    names = [symm.irrep_id2name(mol.groupname, i) for i in mf.orbsym]
    nocc = mol.nelectron // 2
    occ_pi = [i for i in range(nocc) if names[i] in odd][-n_pi // 2:]
    vir_pi = [i for i in range(nocc, len(names)) if names[i] in odd][: n_pi // 2]
    act = occ_pi + vir_pi
    core = [i for i in range(nocc) if i not in act]
    order = core + act + [i for i in range(len(names)) if i not in core and i not in act]
    orbsym = np.asarray(mf.orbsym)[order]
    mo = mf.mo_coeff[:, order]
    h1, eri, ecore = casci_integrals(mf, mo[:, :len(core)], mo[:, len(core):len(core) + n_pi])
    return mol, h1, eri, ecore, molpro_syms(mol, orbsym[len(core):len(core) + n_pi])


def benzene():
    mol, h1, eri, ecore, syms = pi_space(BENZENE, 6)
    dump(OUT / "benzene.fcidump", h1, eri, ecore, 6, 6, 0, syms)
    # Triplet sector: M_S = 1, state label of the HOMO->LUMO excitation.
    isym = ((syms[2] - 1) ^ (syms[3] - 1)) + 1
    dump(OUT / "benzene_t1.fcidump", h1, eri, ecore, 6, 6, 2, syms, isym=isym)


def naphthalene():
    mol, h1, eri, ecore, syms = pi_space(NAPHTHALENE, 10)
    dump(OUT / "naphthalene.fcidump", h1, eri, ecore, 10, 10, 0, syms)


def hchain():
    # Linear H6 with Boys-localized orbitals ordered along the chain axis.
    mol = gto.M(atom="; ".join(f"H 0 0 {1.0 * i}" for i in range(6)), basis="sto-3g")
    mf = scf.RHF(mol).run()
    nocc = mol.nelectron // 2
    occ = lo.Boys(mol, mf.mo_coeff[:, :nocc]).kernel()
    vir = lo.Boys(mol, mf.mo_coeff[:, nocc:]).kernel()
    mo = np.hstack([occ, vir])
    r = mol.intor("int1e_r")
    centroid = np.einsum("pi,xpq,qi->ix", mo, r, mo)[:, 2]
    mo = mo[:, np.argsort(centroid, kind="stable")]
    h1, eri, ecore = casci_integrals(mf, mo[:, :0], mo)
    dump(OUT / "h6_chain_local.fcidump", h1, eri, ecore, 6, 6, 0, None)


if __name__ == "__main__":
    targets = sys.argv[1:] or ["h2", "h2o", "benzene", "naphthalene", "hchain"]
    for name in targets:
        globals()[name]()
