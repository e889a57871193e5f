use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streamprop::kernel::{
    kernel_dense, kernel_stream, run_kernel, run_kernel_pipelined, KernelStream,
    GRADIENT_LINE_ROWS, NMS_LINE_ROWS, SVM_LINE_ROWS,
};
use streamprop::scaler::{pingpong_stream, stream_batches, PixelBatch};
use streamprop::{Error, RgbImage, SvmModel};

fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> RgbImage {
    RgbImage::from_fn(w, h, |_, _| rng.gen())
}

fn random_model(rng: &mut impl Rng) -> SvmModel {
    SvmModel::from_integer_weights(std::array::from_fn(|_| rng.gen_range(-20..=20)))
}

#[test]
fn streaming_matches_dense_on_random_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..150 {
        let (w, h) = (rng.gen_range(8..=64), rng.gen_range(8..=64));
        let img = random_image(&mut rng, w, h);
        let model = random_model(&mut rng);
        let dense = kernel_dense(&img, &model, 3).unwrap();
        let (streamed, stats) = run_kernel(stream_batches(&img), w, h, &model, 3).unwrap();
        assert_eq!(streamed, dense, "{w}x{h}");
        assert!(stats.gradient.peak_rows <= GRADIENT_LINE_ROWS);
        assert!(stats.svm.peak_rows <= SVM_LINE_ROWS);
        assert!(stats.nms.peak_rows <= NMS_LINE_ROWS);
        assert!(stats.fifo_peak <= stats.fifo_capacity);
    }
}

#[test]
fn small_images_with_few_distinct_values() {
    // low-entropy pixels make ties common, exercising the tie rules
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for w in 8..=21 {
        for h in 8..=21 {
            let levels = [0u8, 128, 255];
            let img = RgbImage::from_fn(w, h, |_, _| [levels[rng.gen_range(0..3)]; 3]);
            let model =
                SvmModel::from_integer_weights(std::array::from_fn(|_| rng.gen_range(-1..=1)));
            let dense = kernel_dense(&img, &model, 0).unwrap();
            let (streamed, _) = run_kernel(stream_batches(&img), w, h, &model, 0).unwrap();
            assert_eq!(streamed, dense, "{w}x{h}");
        }
    }
}

#[test]
fn single_window_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let img = random_image(&mut rng, 8, 8);
    let model = random_model(&mut rng);
    let (c, _) = run_kernel(stream_batches(&img), 8, 8, &model, 0).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c, kernel_dense(&img, &model, 0).unwrap());
}

#[test]
fn buffer_peaks_and_counts_for_64x64() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let img = random_image(&mut rng, 64, 64);
    let (c, stats) = run_kernel(stream_batches(&img), 64, 64, &random_model(&mut rng), 0).unwrap();
    assert_eq!(stats.gradient.peak_rows, 3);
    assert_eq!(stats.svm.peak_rows, 8);
    assert_eq!(stats.nms.peak_rows, 5);
    assert_eq!(stats.gradient.items_in, 64 * 64);
    assert_eq!(stats.gradient.items_out, 64 * 64);
    assert_eq!(stats.svm.items_out, 57 * 57);
    assert_eq!(stats.nms.items_in, 57 * 57);
    assert_eq!(stats.nms.items_out, 12 * 12);
    assert_eq!(c.len(), 144);
}

#[test]
fn tiny_fifo_still_preserves_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let img = random_image(&mut rng, 60, 30);
    let model = random_model(&mut rng);
    let stream =
        KernelStream::with_fifo_capacity(stream_batches(&img), 60, 30, &model, 0, 1).unwrap();
    let (c, stats) = stream.collect_all().unwrap();
    assert_eq!(stats.fifo_peak, 1);
    assert_eq!(c, kernel_dense(&img, &model, 0).unwrap());
}

#[test]
fn pipelined_stages_match_sequential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (w, h) = (rng.gen_range(8..=80), rng.gen_range(8..=80));
        let img = random_image(&mut rng, w, h);
        let model = random_model(&mut rng);
        let (seq, seq_stats) = run_kernel(stream_batches(&img), w, h, &model, 1).unwrap();
        let cap = rng.gen_range(1..8);
        let (par, par_stats) =
            run_kernel_pipelined(stream_batches(&img), w, h, &model, 1, cap).unwrap();
        assert_eq!(par, seq);
        assert_eq!(par_stats.svm, seq_stats.svm);
        assert_eq!(par_stats.gradient, seq_stats.gradient);
    }
}

#[test]
fn pingpong_batches_feed_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let img = random_image(&mut rng, 33, 19);
    let model = random_model(&mut rng);
    let (batches, _) = pingpong_stream(&img);
    let (c, _) = run_kernel(batches, 33, 19, &model, 0).unwrap();
    assert_eq!(c, kernel_dense(&img, &model, 0).unwrap());
}

#[test]
fn out_of_order_batches_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let img = random_image(&mut rng, 16, 16);
    let model = random_model(&mut rng);
    let mut batches: Vec<PixelBatch> = stream_batches(&img).collect();
    batches.swap(3, 4);
    let err = run_kernel(batches, 16, 16, &model, 0).unwrap_err();
    assert!(matches!(err, Error::Stream(_)), "{err}");

    let truncated: Vec<PixelBatch> = stream_batches(&img).take(40).collect();
    let res: Result<Vec<_>, _> = kernel_stream(truncated, 16, 16, &model, 0)
        .unwrap()
        .collect();
    assert!(matches!(res, Err(Error::Stream(_))));

    let err = run_kernel_pipelined(stream_batches(&img).skip(1), 16, 16, &model, 0, 4).unwrap_err();
    assert!(matches!(err, Error::Stream(_)), "{err}");
}

#[test]
fn rejects_undersized_input() {
    let img = RgbImage::filled(7, 9, [1, 2, 3]);
    assert!(run_kernel(stream_batches(&img), 7, 9, &SvmModel::zeros(), 0).is_err());
}
