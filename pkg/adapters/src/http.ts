/**
 * Thin HTTP backend: forwards each producer call to a model-serving
 * endpoint as JSON. Any transport or protocol failure raises
 * ModelUnavailable, which the CLI turns into a nonzero exit.
 */

import { readFile } from 'node:fs/promises';

import {
  AnnotationFile,
  Detection,
  ModelUnavailable,
  ProducerBackend,
  SentenceParse,
} from './formats.js';

export interface HttpBackendOptions {
  endpoint: string;
  captionerId: string;
  parserId: string;
  segmenterId: string;
  timeoutMs?: number;
}

export class HttpBackend implements ProducerBackend {
  constructor(private readonly options: HttpBackendOptions) {}

  private async post(route: string, payload: unknown): Promise<unknown> {
    const url = `${this.options.endpoint.replace(/\/$/, '')}/${route}`;
    try {
      const response = await fetch(url, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(payload),
        signal: AbortSignal.timeout(this.options.timeoutMs ?? 60_000),
      });
      if (!response.ok) {
        throw new ModelUnavailable(`${url} answered ${response.status}`);
      }
      return await response.json();
    } catch (error) {
      if (error instanceof ModelUnavailable) {
        throw error;
      }
      throw new ModelUnavailable(`${url} unreachable: ${String(error)}`);
    }
  }

  private async imageBase64(imagePath: string): Promise<string> {
    return (await readFile(imagePath)).toString('base64');
  }

  async caption(imagePath: string, prompt: string): Promise<string> {
    const reply = (await this.post('caption', {
      model: this.options.captionerId,
      prompt,
      image: await this.imageBase64(imagePath),
    })) as { caption?: string };
    if (typeof reply.caption !== 'string') {
      throw new ModelUnavailable('caption endpoint returned no caption field');
    }
    return reply.caption;
  }

  async parse(sentences: string[]): Promise<SentenceParse[]> {
    const reply = (await this.post('parse', {
      model: this.options.parserId,
      sentences,
    })) as { parses?: SentenceParse[] };
    if (!Array.isArray(reply.parses)) {
      throw new ModelUnavailable('parse endpoint returned no parses field');
    }
    return reply.parses;
  }

  async annotate(imagePath: string, prompt: string): Promise<AnnotationFile> {
    const reply = await this.post('annotate', {
      model: this.options.captionerId,
      prompt,
      image: await this.imageBase64(imagePath),
    });
    return AnnotationFile.parse(reply);
  }

  async segment(
    imagePath: string,
    label: string,
    height: number,
    width: number,
  ): Promise<Detection[]> {
    const reply = (await this.post('segment', {
      model: this.options.segmenterId,
      label,
      height,
      width,
      image: await this.imageBase64(imagePath),
    })) as { detections?: Detection[] };
    if (!Array.isArray(reply.detections)) {
      throw new ModelUnavailable('segment endpoint returned no detections field');
    }
    return reply.detections;
  }
}
