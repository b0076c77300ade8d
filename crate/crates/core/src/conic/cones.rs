use super::Cone;
use crate::error::Result;
use crate::linalg::{psd_project, smat, svec, sym_eig};
use crate::scalar::Real;

fn check_len(v: &[impl Sized], cones: &[Cone]) {
    let rows: usize = cones.iter().map(|k| k.rows()).sum();
    assert_eq!(v.len(), rows, "vector length does not match the cone layout");
}

/// Euclidean projection onto the cone product, block by block.
pub fn project_cone<T: Real>(v: &[T], cones: &[Cone]) -> Result<Vec<T>> {
    let mut out = v.to_vec();
    project_cone_in_place(&mut out, cones)?;
    Ok(out)
}

pub fn project_cone_in_place<T: Real>(v: &mut [T], cones: &[Cone]) -> Result<()> {
    check_len(v, cones);
    let mut offset = 0;
    for &k in cones {
        let block = &mut v[offset..offset + k.rows()];
        match k {
            Cone::Zero(_) => block.iter_mut().for_each(|x| *x = T::zero()),
            Cone::NonNeg(_) => block.iter_mut().for_each(|x| *x = x.max(T::zero())),
            Cone::Psd(d) => {
                let m = smat(block, d)?;
                let p = psd_project(&m)?;
                block.copy_from_slice(&svec(&p));
            }
        }
        offset += k.rows();
    }
    Ok(())
}

/// Projection onto the dual cone product: zero cones dualize to free blocks.
pub fn project_dual_cone<T: Real>(v: &[T], cones: &[Cone]) -> Result<Vec<T>> {
    check_len(v, cones);
    let mut out = v.to_vec();
    let mut offset = 0;
    for &k in cones {
        if !matches!(k, Cone::Zero(_)) {
            project_cone_in_place(&mut out[offset..offset + k.rows()], &[k])?;
        }
        offset += k.rows();
    }
    Ok(out)
}

/// ∞-norm distance from `v` to its projection.
pub fn dist_inf<T: Real>(v: &[T], projected: &[T]) -> T {
    v.iter()
        .zip(projected)
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
}

/// Smallest eigenvalue of each PSD block, in block order.
pub fn psd_block_min_eigs<T: Real>(v: &[T], cones: &[Cone]) -> Result<Vec<T>> {
    check_len(v, cones);
    let mut out = Vec::new();
    let mut offset = 0;
    for &k in cones {
        if let Cone::Psd(d) = k {
            let m = smat(&v[offset..offset + k.rows()], d)?;
            out.push(sym_eig(&m)?.eigenvalues[0]);
        }
        offset += k.rows();
    }
    Ok(out)
}
