// SPDX-License-Identifier: MIT
//
// Standalone cross-check utility: decodes an Annex-B HEVC elementary stream
// with libavcodec and writes the raw I420 planes to a file. Used to validate
// the test fixture reconstructions in tests/data/ against an independent
// decoder. Not part of the CMake build so the project carries no FFmpeg
// dependency; build manually when needed:
//
//   gcc -O2 tools/avdec.c -o avdec -lavcodec -lavutil
//   ./avdec tests/data/grid_busy_64_q32.hevc out.yuv
//   cmp out.yuv tests/data/grid_busy_64_q32.yuv

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include <libavcodec/avcodec.h>

static int g_frames = 0;

static void decode_and_dump(AVCodecContext* ctx, AVFrame* frame, AVPacket* pkt,
                            FILE* out) {
  if (avcodec_send_packet(ctx, pkt) < 0) {
    fprintf(stderr, "avdec: send_packet failed\n");
    exit(1);
  }
  while (avcodec_receive_frame(ctx, frame) == 0) {
    for (int p = 0; p < 3; p++) {
      int pw = p ? frame->width / 2 : frame->width;
      int ph = p ? frame->height / 2 : frame->height;
      for (int y = 0; y < ph; y++)
        fwrite(frame->data[p] + (size_t)y * frame->linesize[p], 1, pw, out);
    }
    g_frames++;
  }
}

int main(int argc, char** argv) {
  if (argc != 3) {
    fprintf(stderr, "usage: avdec <in.hevc> <out.yuv>\n");
    return 2;
  }
  FILE* f = fopen(argv[1], "rb");
  if (!f) {
    perror("avdec: open");
    return 1;
  }
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  fseek(f, 0, SEEK_SET);
  uint8_t* buf = malloc((size_t)n + AV_INPUT_BUFFER_PADDING_SIZE);
  if (!buf || fread(buf, 1, (size_t)n, f) != (size_t)n) {
    fprintf(stderr, "avdec: short read\n");
    return 1;
  }
  fclose(f);
  memset(buf + n, 0, AV_INPUT_BUFFER_PADDING_SIZE);

  const AVCodec* codec = avcodec_find_decoder(AV_CODEC_ID_HEVC);
  if (!codec) {
    fprintf(stderr, "avdec: no HEVC decoder in this libavcodec\n");
    return 1;
  }
  AVCodecParserContext* parser = av_parser_init(codec->id);
  AVCodecContext* ctx = avcodec_alloc_context3(codec);
  if (!parser || !ctx || avcodec_open2(ctx, codec, NULL) < 0) {
    fprintf(stderr, "avdec: decoder init failed\n");
    return 1;
  }
  AVPacket* pkt = av_packet_alloc();
  AVFrame* frame = av_frame_alloc();
  FILE* out = fopen(argv[2], "wb");
  if (!out) {
    perror("avdec: open output");
    return 1;
  }

  // Canonical parse loop: one zero-length parse after the payload signals
  // EOF to the parser so it releases the final access unit.
  uint8_t* data = buf;
  long remain = n;
  int eof = 0;
  while (!eof) {
    eof = (remain == 0);
    int r = av_parser_parse2(parser, ctx, &pkt->data, &pkt->size, data,
                             (int)remain, AV_NOPTS_VALUE, AV_NOPTS_VALUE, 0);
    if (r < 0) {
      fprintf(stderr, "avdec: parse error\n");
      return 1;
    }
    data += r;
    remain -= r;
    if (pkt->size) decode_and_dump(ctx, frame, pkt, out);
  }
  decode_and_dump(ctx, frame, NULL, out);
  fclose(out);

  fprintf(stderr, "avdec: %d frame(s), %dx%d\n", g_frames, ctx->width,
          ctx->height);
  av_frame_free(&frame);
  av_packet_free(&pkt);
  avcodec_free_context(&ctx);
  av_parser_close(parser);
  free(buf);
  return g_frames > 0 ? 0 : 1;
}
