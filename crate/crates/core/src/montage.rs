//! Side-by-side qualitative panels: input, ground truth, with-SR output,
//! without-SR output.

use alloc::vec::Vec;

use crate::raster::raster_from_mask;
use crate::resample::{resample, KernelKind};
use crate::{BinaryMask, Error, Raster, Result};

pub const SEPARATOR_WIDTH: u32 = 4;
pub const SEPARATOR_VALUE: u8 = 128;

fn to_channels(img: &Raster, channels: u8) -> Result<Raster> {
    if img.channels() == channels {
        return Ok(img.clone());
    }
    let plane = crate::raster::to_grayscale(img);
    match channels {
        1 => Ok(plane),
        _ => Raster::merge_channels(&[plane.clone(), plane.clone(), plane]),
    }
}

/// Concatenates the four panels left to right, each resized with nearest
/// neighbour to the input's height, separated by mid-gray columns. Masks
/// render black text on white. The output keeps the input's channel count.
pub fn render_montage(
    input: &Raster,
    gt: &BinaryMask,
    with_sr: &BinaryMask,
    without_sr: &BinaryMask,
) -> Result<Raster> {
    let height = input.height();
    let ch = input.channels();
    let panels = [
        input.clone(),
        raster_from_mask(gt),
        raster_from_mask(with_sr),
        raster_from_mask(without_sr),
    ];
    let mut fitted = Vec::with_capacity(panels.len());
    for p in &panels {
        let w =
            ((p.width() as u64 * height as u64 + p.height() as u64 / 2) / p.height() as u64) as u32;
        if w == 0 {
            return Err(Error::ImageTooSmall {
                width: p.width(),
                height: p.height(),
                min_width: 1,
                min_height: 1,
            });
        }
        let resized = if p.dims() == (w, height) {
            p.clone()
        } else {
            resample(p, w, height, KernelKind::Nearest)?
        };
        fitted.push(to_channels(&resized, ch)?);
    }

    let total_w: u32 =
        fitted.iter().map(Raster::width).sum::<u32>() + SEPARATOR_WIDTH * (fitted.len() as u32 - 1);
    let mut out = Vec::with_capacity(total_w as usize * height as usize * ch as usize);
    for y in 0..height as usize {
        for (i, p) in fitted.iter().enumerate() {
            if i > 0 {
                out.extend(core::iter::repeat_n(
                    SEPARATOR_VALUE,
                    (SEPARATOR_WIDTH * ch as u32) as usize,
                ));
            }
            let row = p.width() as usize * ch as usize;
            out.extend_from_slice(&p.samples()[y * row..(y + 1) * row]);
        }
    }
    Raster::new(total_w, height, ch, out)
}
