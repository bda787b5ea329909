import { ApiClient } from './api.js';
import { ConsoleController } from './controller.js';
import { ConsoleRenderer } from './render.js';

const params = new URLSearchParams(window.location.search);
const serviceUrl = params.get('service') ?? 'http://127.0.0.1:8000';

const controller = new ConsoleController(new ApiClient(serviceUrl));
const root = document.getElementById('app');
if (!root) throw new Error('missing #app mount point');
new ConsoleRenderer(root, controller);

void controller.loadModels().then(() => {
  const first = controller.getState().models[0];
  if (first) void controller.openSession(first);
});
