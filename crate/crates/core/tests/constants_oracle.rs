use dashu_int::UBig;
use sgl_core::constants::{ell_star, ell_star_f64};

/// `(3001/3000)^ℓ <= 5(d−1)/4` in integers.
fn fits(d: usize, ell: usize) -> bool {
    UBig::from(4u8) * UBig::from(3001u16).pow(ell) <= UBig::from(5 * (d - 1)) * UBig::from(3000u16).pow(ell)
}

#[test]
fn ell_star_is_the_largest_fitting_exponent() {
    for d in [3, 4, 5, 8, 17] {
        let l = ell_star(d) as usize;
        assert!(fits(d, l), "d = {d}");
        assert!(!fits(d, l + 1), "d = {d}");
        assert_eq!(ell_star_f64(d) as usize, l);
    }
    assert_eq!(ell_star(3), 2749);
}
