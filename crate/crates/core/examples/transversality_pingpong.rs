//! Angle survey between invariant directions of two maps, then a
//! ping-pong certificate for the pair.

use abc_torus::hyperbolic::{pingpong_certificate, transversality_report, PingPongOptions};
use abc_torus::torus_maps::TorusLift;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = TorusLift::cat();
    let h = TorusLift::shear(0.3);
    let t = transversality_report(&f, &h, 128, 30, 1)?;
    println!("classification {:?}", t.classification);
    println!("angle minima (ss, su, us, uu) {:?}", t.minima);
    let opts = PingPongOptions { word_length: 3, seed: 1, ..PingPongOptions::default() };
    let cert = pingpong_certificate(&f, &h, &opts)?;
    println!("N = {}, {} words checked, min separation {:.3e}", cert.n, cert.words_checked, cert.min_separation);
    Ok(())
}
